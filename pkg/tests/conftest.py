import numpy as np
import pytest

from brusselator.model import NondimParams


def params(Q2=3.0, eta2=0.36, b=5.3028, Gamma=80.0, m=1.0, n=1.0):
    return NondimParams.from_squares(Q2, eta2, b, Gamma, m, n)


@pytest.fixture
def fig31():
    return params()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
