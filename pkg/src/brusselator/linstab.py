"""Linear stability of the homogeneous steady state.

Dispersion relation ``sigma^2 + g(k^2) sigma + h(k^2) = 0`` with::

    g(k^2) = k^2 tr(D) - Gamma tr(K)
    h(k^2) = det(D) k^4 + Gamma q k^2 + Gamma^2 det(K)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import NondimParams


class NoTuringBranch(RuntimeError):
    pass


@dataclass(frozen=True)
class Linearization:
    K: np.ndarray
    D: np.ndarray
    q: float

    @property
    def tr(self) -> float:
        return float(np.trace(self.K))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.K))


@dataclass(frozen=True)
class DispersionSample:
    k2: float
    roots: np.ndarray
    g_val: float
    h_val: float

    @property
    def max_real(self) -> float:
        return float(np.max(self.roots.real))


@dataclass(frozen=True)
class Thresholds:
    b_hopf: float
    b_turing: float
    kc2: float


def kinetics_jacobian(p: NondimParams, b: float | None = None) -> np.ndarray:
    b = p.b if b is None else b
    e2 = p.eta**2
    return np.array([[b - 1.0, p.Q**2], [-b / e2, -p.Q**2 / e2]])


def diffusion_matrix(p: NondimParams, b: float | None = None) -> np.ndarray:
    b = p.b if b is None else b
    return np.diag([(p.m + 1.0) * p.Q**p.m, (p.n + 1.0) / p.eta**2 * (b / p.Q) ** p.n])


def linearize(p: NondimParams, b: float | None = None) -> Linearization:
    K = kinetics_jacobian(p, b)
    D = diffusion_matrix(p, b)
    q = -K[0, 0] * D[1, 1] - K[1, 1] * D[0, 0]
    return Linearization(K=K, D=D, q=float(q))


def dispersion_coefficients(p: NondimParams, k2, b: float | None = None):
    """Return ``(g, h)`` evaluated at squared wavenumber(s) ``k2``."""
    lin = linearize(p, b)
    k2 = np.asarray(k2, dtype=float)
    g = k2 * np.trace(lin.D) - p.Gamma * np.trace(lin.K)
    h = (lin.D[0, 0] * lin.D[1, 1]) * k2**2 + p.Gamma * lin.q * k2 + p.Gamma**2 * p.Q**2 / p.eta**2
    return g, h


def growth_rates(p: NondimParams, k2: float, b: float | None = None) -> DispersionSample:
    if k2 < 0:
        raise ValueError("k2 must be nonnegative")
    g, h = dispersion_coefficients(p, k2, b)
    g = float(g)
    h = float(h)
    disc = complex(g * g - 4.0 * h)
    sq = np.sqrt(disc)
    # avoid cancellation in the smaller-magnitude root
    if g >= 0:
        r1 = (-g - sq) / 2.0
    else:
        r1 = (-g + sq) / 2.0
    r2 = h / r1 if r1 != 0 else (-g - r1)
    roots = np.array(sorted([complex(r1), complex(r2)], key=lambda z: (z.real, z.imag)), dtype=complex)
    return DispersionSample(k2=float(k2), roots=roots, g_val=g, h_val=h)


def max_growth(p: NondimParams, k2, b: float | None = None) -> np.ndarray:
    """Largest real part of the growth rate, vectorized over ``k2``."""
    g, h = dispersion_coefficients(p, k2, b)
    disc = g * g - 4.0 * h
    sq = np.sqrt(np.abs(disc))
    return np.where(disc >= 0, (-g + sq) / 2.0, -g / 2.0)


def hopf_threshold(p: NondimParams) -> float:
    return 1.0 + p.Q**2 / p.eta**2


def _turing_residual(b: float, Q: float, m: float, n: float) -> float:
    # s = -eta^2 q; threshold where s = 2 sqrt(eta^4 det D det K), s > 0
    s = (n + 1.0) * (b / Q) ** n * (b - 1.0) - (m + 1.0) * Q ** (m + 2.0)
    return s - 2.0 * math.sqrt((m + 1.0) * (n + 1.0) * Q ** (m - n + 2.0) * b**n)


def turing_b(Q: float, m: float, n: float, b_max: float = 1e8) -> float:
    """Turing threshold ``b^c`` for given ``(Q, m, n)``; independent of eta and Gamma."""
    grid = 1.0 + np.geomspace(1e-12, b_max, 4000)
    prev = 1.0
    f_prev = _turing_residual(prev, Q, m, n)
    for b in grid:
        f = _turing_residual(b, Q, m, n)
        if f_prev < 0.0 <= f:
            return brentq(_turing_residual, prev, b, args=(Q, m, n), xtol=1e-13, rtol=1e-15)
        prev, f_prev = b, f
    raise NoTuringBranch(f"no Turing threshold found for Q={Q}, m={m}, n={n} below b={b_max}")


def critical_k2(p: NondimParams, b: float) -> float:
    """Squared wavenumber minimizing ``h(k^2)`` at bifurcation value ``b``."""
    Q, m, n = p.Q, p.m, p.n
    num = (1.0 - b) * (n + 1.0) * (b / Q) ** n + (m + 1.0) * Q ** (m + 2.0)
    den = 2.0 * (m + 1.0) * (n + 1.0) * Q ** (m - n) * b**n
    return -p.Gamma * num / den


def turing_threshold(p: NondimParams) -> Thresholds:
    bt = turing_b(p.Q, p.m, p.n)
    return Thresholds(b_hopf=hopf_threshold(p), b_turing=bt, kc2=critical_k2(p, bt))


def unstable_band(p: NondimParams, b: float | None = None) -> tuple[float, float] | None:
    """Band edges ``(k1^2, k2^2)`` where ``h < 0``, or None when no Turing band exists."""
    lin = linearize(p, b)
    a2 = lin.D[0, 0] * lin.D[1, 1]
    a1 = p.Gamma * lin.q
    a0 = p.Gamma**2 * p.Q**2 / p.eta**2
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc <= 0 or a1 >= 0:
        return None
    sq = math.sqrt(disc)
    hi = (-a1 + sq) / (2.0 * a2)
    lo = a0 / (a2 * hi)
    return lo, hi


def mode_threshold(p: NondimParams, k2: float, b_max: float = 1e8) -> float:
    """Smallest ``b > 1`` at which the mode with squared wavenumber ``k2`` turns neutral (``h = 0``)."""
    if k2 <= 0:
        raise ValueError("k2 must be positive")

    def h_of_b(b):
        return float(dispersion_coefficients(p, k2, b)[1])

    grid = 1.0 + np.geomspace(1e-12, b_max, 4000)
    prev, f_prev = 1.0, h_of_b(1.0)
    for b in grid:
        f = h_of_b(b)
        if f_prev > 0.0 >= f:
            return brentq(h_of_b, prev, b, xtol=1e-14, rtol=1e-15)
        prev, f_prev = b, f
    raise NoTuringBranch(f"mode k2={k2} never destabilizes below b={b_max}")


def classify_region(b: float, b_hopf: float, b_turing: float) -> str:
    turing = b > b_turing
    hopf = b > b_hopf
    if turing and hopf:
        return "T-H"
    if turing:
        return "T"
    if hopf:
        return "H"
    return "stable"


def sweep_eta_Q(m: float, n: float, b: float, Gamma: float, eta2_grid, Q2_grid,
                criticality: bool = False) -> list[dict]:
    """Region labels on an ``(eta^2, Q^2)`` grid at fixed ``b``.

    With ``criticality=True`` rows inside the Turing region also carry the
    sign of the cubic Landau coefficient (``super``/``sub``).
    """
    bt_cache = {}
    rows = []
    for Q2 in Q2_grid:
        Q = math.sqrt(Q2)
        if Q2 not in bt_cache:
            bt_cache[Q2] = turing_b(Q, m, n)
        bt = bt_cache[Q2]
        for eta2 in eta2_grid:
            p = NondimParams.from_squares(Q2, eta2, b, Gamma, m, n)
            bh = hopf_threshold(p)
            row = {"eta2": float(eta2), "Q2": float(Q2), "b": float(b), "b_hopf": bh,
                   "b_turing": bt, "kc2": critical_k2(p, bt),
                   "region": classify_region(b, bh, bt)}
            if criticality:
                row["criticality"] = _criticality(p, bt) if row["region"] in ("T", "T-H") else ""
            rows.append(row)
    return rows


def sweep_Q_b(m: float, n: float, eta2: float, Gamma: float, Q2_grid, b_grid) -> list[dict]:
    """Region labels on a ``(Q^2, b)`` grid at fixed ``eta^2``."""
    rows = []
    for Q2 in Q2_grid:
        bt = turing_b(math.sqrt(Q2), m, n)
        for b in b_grid:
            p = NondimParams.from_squares(Q2, eta2, b, Gamma, m, n)
            bh = hopf_threshold(p)
            rows.append({"Q2": float(Q2), "b": float(b), "eta2": float(eta2), "b_hopf": bh,
                         "b_turing": bt, "kc2": critical_k2(p, bt),
                         "region": classify_region(b, bh, bt)})
    return rows


def boundary_curves(m: float, n: float, eta2_values, Q2_grid) -> dict[str, np.ndarray]:
    """Polylines ``b_turing(Q^2)`` and ``b_hopf(Q^2)`` for each eta^2 (the instability regions lie above)."""
    Q2_grid = np.asarray(Q2_grid, dtype=float)
    out = {"Q2": Q2_grid, "b_turing": np.array([turing_b(math.sqrt(x), m, n) for x in Q2_grid])}
    for e2 in eta2_values:
        out[f"b_hopf_eta2={e2:g}"] = 1.0 + Q2_grid / e2
    return out


def _criticality(p: NondimParams, bt: float) -> str:
    from .wnl import stuart_landau_coeffs

    L = stuart_landau_coeffs(p).coefficients["L"]
    return "super" if L > 0 else "sub"
