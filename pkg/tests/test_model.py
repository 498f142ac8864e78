import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brusselator.model import (NondimParams, ParameterError, PhysicalParams, kinetics,
                               nondimensionalize, params_from_config, redimensionalize_kinetics,
                               steady_state)

pos = st.floats(min_value=0.05, max_value=20.0)
expo = st.floats(min_value=0.0, max_value=3.0)


def phys(**kw):
    base = dict(D_u=1.0, D_v=1.0, u0=1.0, v0=1.0, a=2.0, b=3.0, Gamma=1.0, m=1.0, n=1.0)
    base.update(kw)
    return PhysicalParams(**base)


def test_nondim_unit_scales():
    p, s = nondimensionalize(phys())
    assert s.u_star == pytest.approx(1.0)
    assert p.eta == pytest.approx(1.0)
    assert p.Q == pytest.approx(2.0)


def test_nondim_linear_diffusion():
    p, s = nondimensionalize(phys(m=0.0, n=0.0, D_v=4.0))
    assert s.u_star == pytest.approx(2.0)
    assert p.eta == pytest.approx(0.5)


def test_nondim_arithmetic_oracle():
    p, s = nondimensionalize(phys(m=1.0, n=2.0, D_u=0.5, D_v=2.0, u0=2.0, v0=1.0, a=1.0))
    # (m+1) D_v u0^m / ((n+1) D_u v0^n) = 2*2*2 / (3*0.5) = 16/3
    u_star = (16.0 / 3.0) ** 0.2
    x_star = math.sqrt(2.0 / (3.0 * u_star**4))
    assert s.u_star == pytest.approx(u_star, rel=1e-14)
    assert s.v_star == pytest.approx(1.0 / u_star, rel=1e-14)
    assert s.x_star == pytest.approx(x_star, rel=1e-14)
    assert p.eta == pytest.approx(1.0 / u_star, rel=1e-14)
    assert p.Q == pytest.approx(1.0 * p.eta, rel=1e-14)


@given(pos, pos, pos, pos, pos, pos, pos, expo, expo)
@settings(max_examples=60, deadline=None)
def test_round_trip(Du, Dv, u0, v0, a, b, G, m, n):
    pp = PhysicalParams(Du, Dv, u0, v0, a, b, G, m, n)
    p, _ = nondimensionalize(pp)
    back = redimensionalize_kinetics(p)
    assert back["a"] == pytest.approx(a, rel=1e-12)
    assert back["Gamma"] == pytest.approx(G, rel=1e-12)
    assert p.Q == pytest.approx(a * p.eta, rel=1e-12)


@pytest.mark.parametrize("field", ["D_u", "D_v", "u0", "v0", "a", "b", "Gamma"])
def test_physical_rejects_nonpositive(field):
    with pytest.raises(ParameterError):
        phys(**{field: 0.0})
    with pytest.raises(ValueError):
        phys(**{field: -1.0})


def test_nondim_rejects_bad():
    with pytest.raises(ParameterError):
        NondimParams(Q=-1.0, eta=1.0, b=1.0, Gamma=1.0)
    with pytest.raises(ParameterError):
        NondimParams(Q=1.0, eta=1.0, b=1.0, Gamma=1.0, m=float("nan"))
    with pytest.raises(ParameterError):
        NondimParams.from_squares(0.0, 1.0, 1.0, 1.0)


def test_kinetics_vanish_at_steady(fig31):
    s = steady_state(fig31)
    f, g = kinetics(fig31, s.u_bar, s.v_bar)
    assert abs(f) < 1e-12 and abs(g) < 1e-12


def test_kinetics_zero_u(fig31):
    f, g = kinetics(fig31, 0.0, np.array([0.0, 1.0, 7.0]))
    assert np.allclose(f, fig31.Gamma * fig31.Q)
    assert np.allclose(g, 0.0)


def test_steady_state_examples():
    s = steady_state(NondimParams(Q=1.0, eta=1.0, b=4.0, Gamma=1.0))
    assert (s.u_bar, s.v_bar) == (1.0, 4.0)
    s = steady_state(NondimParams.from_squares(3.0, 0.36, 5.3028, 80.0))
    assert s.u_bar == pytest.approx(1.7321, abs=5e-5)
    assert s.v_bar == pytest.approx(3.0616, abs=5e-5)


def test_steady_state_random_draws(rng):
    for _ in range(100):
        Q, eta, b, G = rng.uniform(0.1, 5.0, 4)
        p = NondimParams(Q, eta, b, G, *rng.uniform(0, 3, 2))
        s = steady_state(p)
        f, g = kinetics(p, s.u_bar, s.v_bar)
        scale = G * (1 + b) * Q / eta**2
        assert abs(f) <= 1e-14 * scale and abs(g) <= 1e-14 * scale


@given(st.floats(0.0, 10.0), st.floats(0.0, 10.0), pos, st.floats(0.1, 3.0), pos, pos)
@settings(max_examples=100, deadline=None)
def test_identity_f_plus_eta2_g(u, v, Q, eta, b, G):
    p = NondimParams(Q, eta, b, G)
    f, g = kinetics(p, u, v)
    lhs = f + eta**2 * g
    assert lhs == pytest.approx(G * (Q - u), abs=1e-9 * G * (1 + u * u * v + b * u + Q))


def test_config_squares_and_epsilon():
    p = params_from_config({"Q2": 3, "eta2": 0.36, "Gamma": 80, "b": 6.0})
    assert p.Q2 == pytest.approx(3.0) and p.b == 6.0
    p = params_from_config({"Q2": 3, "eta2": 0.36, "Gamma": 80, "epsilon": 0.1})
    assert p.b == pytest.approx(5.3028 * 1.01, rel=1e-4)
    p = params_from_config({"physical": dict(D_u=1, D_v=1, u0=1, v0=1, a=2, b=3, Gamma=1, m=1, n=1)})
    assert p.Q == pytest.approx(2.0)
    with pytest.raises(ParameterError):
        params_from_config({"Q2": 3})


def test_to_dict_and_with_b(fig31):
    d = fig31.with_b(7.0).to_dict()
    assert d["b"] == 7.0 and d["Q2"] == pytest.approx(3.0) and d["eta2"] == pytest.approx(0.36)
    assert fig31.with_epsilon(5.0, 0.1).b == pytest.approx(5.05)
