"""Parameters, rescaling and kinetics of the Brusselator with density-dependent diffusion.

The rescaled system reads::

    u_t = (u^(m+1))_xx + Gamma * (Q - (b+1) u + u^2 v)
    v_t = (v^(n+1))_xx / eta^2 + Gamma / eta^2 * (b u - u^2 v)

with homogeneous Neumann conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Mapping

import numpy as np


class ParameterError(ValueError):
    """Raised for parameters outside the model's domain of validity."""


@dataclass(frozen=True)
class PhysicalParams:
    D_u: float
    D_v: float
    u0: float
    v0: float
    a: float
    b: float
    Gamma: float
    m: float
    n: float

    def __post_init__(self):
        for name in ("D_u", "D_v", "u0", "v0", "a", "b", "Gamma"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be positive and finite, got {val!r}")
        for name in ("m", "n"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val >= 0):
                raise ParameterError(f"{name} must be a finite nonnegative number, got {val!r}")


@dataclass(frozen=True)
class NondimParams:
    """Rescaled parameters ``(Q, eta, b, Gamma, m, n)``.

    ``b`` is the bifurcation parameter. Analyses that only need the
    b-independent part (thresholds) ignore it.
    """

    Q: float
    eta: float
    b: float
    Gamma: float
    m: float = 1.0
    n: float = 1.0

    def __post_init__(self):
        for name in ("Q", "eta", "b"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be positive and finite, got {val!r}")
        # Gamma = 0 (pure diffusion) is admitted for conservation checks
        if not (np.isfinite(self.Gamma) and self.Gamma >= 0):
            raise ParameterError(f"Gamma must be nonnegative and finite, got {self.Gamma!r}")
        for name in ("m", "n"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val >= 0):
                raise ParameterError(f"{name} must be a finite nonnegative number, got {val!r}")

    @property
    def Q2(self) -> float:
        return self.Q**2

    @property
    def eta2(self) -> float:
        return self.eta**2

    def with_b(self, b: float) -> "NondimParams":
        return replace(self, b=float(b))

    def with_epsilon(self, b_crit: float, eps: float) -> "NondimParams":
        """Parameters at ``b = b_crit * (1 + eps^2)``."""
        return replace(self, b=float(b_crit * (1.0 + eps**2)))

    def to_dict(self) -> dict[str, float]:
        return {"Q2": self.Q2, "eta2": self.eta2, "b": self.b,
                "Gamma": self.Gamma, "m": self.m, "n": self.n}

    @classmethod
    def from_squares(cls, Q2: float, eta2: float, b: float, Gamma: float,
                     m: float = 1.0, n: float = 1.0) -> "NondimParams":
        if Q2 <= 0 or eta2 <= 0:
            raise ParameterError("Q2 and eta2 must be positive")
        return cls(Q=math.sqrt(Q2), eta=math.sqrt(eta2), b=b, Gamma=Gamma, m=m, n=n)


@dataclass(frozen=True)
class Scales:
    u_star: float
    v_star: float
    x_star: float


@dataclass(frozen=True)
class SteadyState:
    u_bar: float
    v_bar: float


def nondimensionalize(p: PhysicalParams) -> tuple[NondimParams, Scales]:
    """Rescale ``U = u* u``, ``V = v* v``, ``zeta = x* x``.

    Returns the rescaled parameters and the scale factors.
    """
    expo = 1.0 / (p.m + p.n + 2.0)
    u_star = ((p.m + 1) * p.D_v * p.u0**p.m / ((p.n + 1) * p.D_u * p.v0**p.n)) ** expo
    v_star = 1.0 / u_star
    x_star = math.sqrt(p.D_v / ((p.n + 1) * p.v0**p.n * u_star ** (p.n + 2)))
    eta = 1.0 / u_star
    Q = p.a / u_star
    return NondimParams(Q=Q, eta=eta, b=p.b, Gamma=p.Gamma, m=p.m, n=p.n), Scales(u_star, v_star, x_star)


def redimensionalize_kinetics(np_: NondimParams) -> dict[str, float]:
    """Recover ``a`` (and the unchanged ``b``, ``Gamma``) from rescaled parameters."""
    return {"a": np_.Q / np_.eta, "b": np_.b, "Gamma": np_.Gamma}


def kinetics(p: NondimParams, u, v):
    """Reaction terms ``(f, g)`` of the rescaled system; vectorized over arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u2v = u * u * v
    f = p.Gamma * (p.Q - (p.b + 1.0) * u + u2v)
    g = p.Gamma / p.eta**2 * (p.b * u - u2v)
    return f, g


def steady_state(p: NondimParams) -> SteadyState:
    return SteadyState(u_bar=p.Q, v_bar=p.b / p.Q)


def params_from_config(cfg: Mapping[str, Any]) -> NondimParams:
    """Build parameters from a JSON-style mapping.

    Accepts ``{"Q2", "eta2", "b", "Gamma", "m", "n"}`` (``Q``/``eta`` are
    also recognized) or ``{"physical": {...}}``. When ``b`` is absent it
    may be given relative to threshold as ``"epsilon"``; the threshold is
    then computed from the Turing condition.
    """
    if "physical" in cfg:
        phys = PhysicalParams(**{k: float(v) for k, v in cfg["physical"].items()})
        p, _ = nondimensionalize(phys)
        return p
    try:
        Q2 = float(cfg["Q2"]) if "Q2" in cfg else float(cfg["Q"]) ** 2
        eta2 = float(cfg["eta2"]) if "eta2" in cfg else float(cfg["eta"]) ** 2
        Gamma = float(cfg["Gamma"])
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc.args[0]!r}") from None
    m = float(cfg.get("m", 1.0))
    n = float(cfg.get("n", 1.0))
    if "b" in cfg:
        b = float(cfg["b"])
    elif "epsilon" in cfg:
        from .linstab import turing_threshold

        probe = NondimParams.from_squares(Q2, eta2, 1.0, Gamma, m, n)
        b = turing_threshold(probe).b_turing * (1.0 + float(cfg["epsilon"]) ** 2)
    else:
        b = 1.0
    return NondimParams.from_squares(Q2, eta2, b, Gamma, m, n)
