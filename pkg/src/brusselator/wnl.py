"""Weakly nonlinear analysis near the Turing threshold.

The amplitude equations are obtained by a graded expansion of the
perturbation ``w = (u - Q, v - b/Q)`` in the physical mode amplitudes
``a_i`` and in ``mu = (b - b_c)/b_c`` (``a ~ eps``, ``mu = eps^2``)::

    w = sum_i a_i rho c_i(x) + h(a, mu),     da_i/dt = g_i(a, mu)

where ``c_i = cos(phi_i x) cos(psi_i y)`` are the critical planforms and
``h`` carries no component along ``rho`` on the critical planforms. At
each degree the operator ``Gamma K - k^2 D`` is inverted mode by mode;
the solvability condition (projection on the adjoint kernel ``psi``)
fixes ``g``. Products of cosines are reduced with product-to-sum rules,
so every coefficient is exact up to floating-point rounding.

Collecting the expansion with ``a = eps A``, ``T = eps^2 t`` gives the
multiple-scale amplitude equations (Stuart-Landau, quintic, coupled
Landau); the resonant system uses ``a = eps^2 A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import linstab
from .model import NondimParams
from .modes import DomainLength, ModeSet


class SolvabilityError(RuntimeError):
    pass


class KernelError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# critical point and kernels


@dataclass(frozen=True)
class Lattice:
    """Squared wavenumbers per unit index: ``k^2(p, q) = p^2 kx2 + q^2 ky2``."""

    kx2: float
    ky2: float = 0.0

    def k2(self, mode: tuple[int, int]) -> float:
        return mode[0] * mode[0] * self.kx2 + mode[1] * mode[1] * self.ky2

    @property
    def kx(self) -> float:
        return math.sqrt(self.kx2)

    @property
    def ky(self) -> float:
        return math.sqrt(self.ky2)


@dataclass(frozen=True)
class CriticalPoint:
    params: NondimParams  # with b = b_c
    b_c: float
    k2: float
    lattice: Lattice
    modes: tuple[tuple[int, int], ...]
    Lx: float | None = None
    Ly: float | None = None

    @property
    def kc(self) -> float:
        return math.sqrt(self.k2)


def critical_point(p: NondimParams, modeset: ModeSet | None = None) -> CriticalPoint:
    """Threshold ``(b_c, k_c^2)`` and planforms used by the expansion.

    Without a mode set this is the unbounded-domain threshold with one 1D
    planform ``cos(k_c x)``. With a mode set, ``b_c`` is the value at which
    the admissible wavenumber itself turns neutral, so that the linear
    operator on the critical planforms is exactly singular.
    """
    if modeset is None:
        th = linstab.turing_threshold(p)
        return CriticalPoint(p.with_b(th.b_turing), th.b_turing, th.kc2, Lattice(th.kc2), ((1, 0),))
    k2 = float(modeset.k2)
    b_c = linstab.mode_threshold(p, k2)
    kx2 = 1.0 / float(modeset.Lx.ratio2)
    ky2 = 0.0 if modeset.Ly is None else 1.0 / float(modeset.Ly.ratio2)
    return CriticalPoint(p.with_b(b_c), b_c, k2, Lattice(kx2, ky2), tuple(modeset.indices),
                         modeset.Lx.value, None if modeset.Ly is None else modeset.Ly.value)


def critical_point_1d(p: NondimParams, L: str | float | DomainLength = "2") -> CriticalPoint:
    """Critical point for the most unstable admissible mode on ``[0, L]`` (``L`` in units of pi)."""
    from .modes import admissible_modes

    th = linstab.turing_threshold(p)
    b_probe = p.b if p.b > th.b_turing else th.b_turing * (1 + 1e-4)
    ms = admissible_modes(p.with_b(b_probe), L)
    return critical_point(p, ms)


@dataclass(frozen=True)
class KernelPair:
    rho: np.ndarray
    psi_adj: np.ndarray
    matrix: np.ndarray

    @property
    def residuals(self) -> tuple[float, float]:
        return (float(np.max(np.abs(self.matrix @ self.rho))),
                float(np.max(np.abs(self.matrix.T @ self.psi_adj))))


def operator_matrix(p: NondimParams, k2: float, b: float | None = None) -> np.ndarray:
    lin = linstab.linearize(p, b)
    return p.Gamma * lin.K - k2 * lin.D


def critical_kernels(p: NondimParams, b_c: float, k2: float, rho_scale: float = 1.0,
                     tol: float = 1e-8) -> KernelPair:
    """Kernel of ``Gamma K - k^2 D`` and of its transpose.

    ``rho = rho_scale * (1, rho_2)``; ``psi`` is scaled so ``<rho, psi> = 1``.
    """
    M = operator_matrix(p, k2, b_c)
    scale = np.max(np.abs(M)) ** 2
    if abs(np.linalg.det(M)) > tol * scale:
        raise KernelError(f"operator not singular at b={b_c}, k2={k2} (det={np.linalg.det(M):.3e})")
    rho = np.array([1.0, -M[0, 0] / M[0, 1]]) * rho_scale
    psi = np.array([1.0, -M[0, 0] / M[1, 0]])
    psi = psi / float(rho @ psi)
    # enforce exact null vectors by projecting out rounding
    return KernelPair(rho=rho, psi_adj=psi, matrix=M)


def solve_harmonic(M: np.ndarray, rhs: np.ndarray, kernels: KernelPair | None = None,
                   singular_tol: float = 1e-9) -> np.ndarray:
    """Solve ``M x = rhs`` for one Fourier component.

    On a critical planform ``M`` is singular; then ``rhs`` must be orthogonal
    to ``psi`` and the solution returned is the one orthogonal to ``rho``.
    """
    rhs = np.asarray(rhs, dtype=float)
    if not np.any(rhs):
        return np.zeros(2)
    if kernels is None:
        scale = np.max(np.abs(M)) ** 2
        if abs(np.linalg.det(M)) <= singular_tol * scale:
            raise SolvabilityError("singular harmonic system without kernel information")
        return np.linalg.solve(M, rhs)
    rho, psi = kernels.rho, kernels.psi_adj
    proj = float(psi @ rhs) / float(psi @ rho)
    if abs(proj) * np.linalg.norm(rho) > 1e-8 * max(1.0, np.linalg.norm(rhs)):
        raise SolvabilityError(f"right-hand side not orthogonal to the adjoint kernel (proj={proj:.3e})")
    # bordered system: M x = rhs, rho . x = 0
    B = np.zeros((3, 3))
    B[:2, :2] = M
    B[:2, 2] = psi
    B[2, :2] = rho
    sol = np.linalg.solve(B, np.array([rhs[0], rhs[1], 0.0]))
    return sol[:2]


@dataclass(frozen=True)
class ExpansionTables:
    D1: np.ndarray
    D2: np.ndarray
    quad_uv: float  # coefficient of u v in the kinetics (times Gamma)
    quad_uu: float  # coefficient of u^2
    cubic_uuv: float
    b_corrections: tuple[float, float]


def expansion_tables(p: NondimParams, b_c: float) -> ExpansionTables:
    m, n, Q, e2 = p.m, p.n, p.Q, p.eta**2
    D1 = np.diag([m * (m + 1) / 2 * Q ** (m - 1), n * (n + 1) / (2 * e2) * (b_c / Q) ** (n - 1)])
    D2 = np.diag([m * (m * m - 1) / 6 * Q ** (m - 2), n * (n * n - 1) / (6 * e2) * (b_c / Q) ** (n - 2)])
    return ExpansionTables(D1=D1, D2=D2, quad_uv=2 * Q, quad_uu=b_c / Q, cubic_uuv=1.0,
                           b_corrections=(0.0, b_c))


# --------------------------------------------------------------------------
# truncated trigonometric polynomial series


def _binom(s: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (s - i) / (i + 1)
    return out


class Series:
    """Scalar series ``sum c[mono, mode] * a^mono * cos(p kx x) cos(q ky y)``.

    ``mono`` holds the exponents of the amplitudes followed by that of mu;
    terms above ``max_degree`` (mu counted twice) are dropped.
    """

    __slots__ = ("terms", "nvar", "max_degree")

    def __init__(self, nvar: int, max_degree: int, terms: dict | None = None):
        self.nvar = nvar
        self.max_degree = max_degree
        self.terms: dict = {} if terms is None else terms

    def degree(self, mono) -> int:
        return sum(mono[:-1]) + 2 * mono[-1]

    def copy(self) -> "Series":
        return Series(self.nvar, self.max_degree, dict(self.terms))

    def add_term(self, mono, mode, c):
        if c == 0.0 or self.degree(mono) > self.max_degree:
            return
        key = (mono, mode)
        self.terms[key] = self.terms.get(key, 0.0) + c

    def __add__(self, other: "Series") -> "Series":
        out = self.copy()
        for (mono, mode), c in other.terms.items():
            out.add_term(mono, mode, c)
        return out

    def scale(self, s: float) -> "Series":
        return Series(self.nvar, self.max_degree, {k: s * c for k, c in self.terms.items()})

    def __mul__(self, other: "Series") -> "Series":
        out = Series(self.nvar, self.max_degree)
        md = self.max_degree
        for (m1, (p1, q1)), c1 in self.terms.items():
            d1 = self.degree(m1)
            for (m2, (p2, q2)), c2 in other.terms.items():
                if d1 + self.degree(m2) > md:
                    continue
                mono = tuple(x + y for x, y in zip(m1, m2))
                c = 0.25 * c1 * c2
                for pp in (p1 + p2, abs(p1 - p2)):
                    for qq in (q1 + q2, abs(q1 - q2)):
                        out.add_term(mono, (pp, qq), c)
        return out

    def times_mu_power(self, s: float, mu_exp_max: int | None = None) -> "Series":
        """Multiply by ``(1 + mu)^s`` (truncated)."""
        out = Series(self.nvar, self.max_degree)
        jmax = self.max_degree // 2 if mu_exp_max is None else mu_exp_max
        for (mono, mode), c in self.terms.items():
            for j in range(jmax + 1):
                cj = _binom(s, j)
                if cj == 0.0:
                    continue
                m2 = mono[:-1] + (mono[-1] + j,)
                out.add_term(m2, mode, c * cj)
        return out

    def times_mu(self) -> "Series":
        out = Series(self.nvar, self.max_degree)
        for (mono, mode), c in self.terms.items():
            out.add_term(mono[:-1] + (mono[-1] + 1,), mode, c)
        return out

    def laplacian(self, lattice: Lattice) -> "Series":
        return Series(self.nvar, self.max_degree,
                      {(mono, mode): -lattice.k2(mode) * c for (mono, mode), c in self.terms.items()})

    def of_degree(self, d: int) -> "Series":
        return Series(self.nvar, self.max_degree,
                      {k: c for k, c in self.terms.items() if self.degree(k[0]) == d})

    def d_da(self, i: int) -> "Series":
        out = Series(self.nvar, self.max_degree)
        for (mono, mode), c in self.terms.items():
            e = mono[i]
            if e:
                m2 = mono[:i] + (e - 1,) + mono[i + 1:]
                out.terms[(m2, mode)] = out.terms.get((m2, mode), 0.0) + e * c
        return out

    def times_poly(self, poly: dict) -> "Series":
        """Multiply by a spatially uniform polynomial ``{mono: coef}``."""
        out = Series(self.nvar, self.max_degree)
        for (mono, mode), c in self.terms.items():
            for m2, c2 in poly.items():
                mm = tuple(x + y for x, y in zip(mono, m2))
                out.add_term(mm, mode, c * c2)
        return out


def _zero_mono(nvar: int) -> tuple:
    return (0,) * (nvar + 1)


def _unit_mono(nvar: int, i: int) -> tuple:
    m = [0] * (nvar + 1)
    m[i] = 1
    return tuple(m)


@dataclass
class Expansion:
    """Result of the graded expansion: field corrections and amplitude vector field."""

    cp: CriticalPoint
    kernels: KernelPair
    max_degree: int
    u: Series  # full u-perturbation series (linear part included)
    v: Series
    g: list[dict]  # per amplitude: {mono: coefficient}
    solvability_residuals: dict = field(default_factory=dict)
    off_structure: dict = field(default_factory=dict)

    def coefficient(self, i: int, mono: Iterable[int]) -> float:
        return self.g[i].get(tuple(mono), 0.0)

    def field_terms(self, max_degree: int | None = None):
        """Yield ``(mono, mode, (cu, cv))`` for every term up to ``max_degree``."""
        md = self.max_degree if max_degree is None else max_degree
        keys = set(self.u.terms) | set(self.v.terms)
        for key in sorted(keys):
            mono, mode = key
            if self.u.degree(mono) <= md:
                yield mono, mode, (self.u.terms.get(key, 0.0), self.v.terms.get(key, 0.0))


def _nonlinear_rhs(cp: CriticalPoint, u: Series, v: Series) -> tuple[Series, Series]:
    """Everything in the right-hand side except ``L_c w``: nonlinear terms and the mu-shift of the linear part."""
    p = cp.params
    b_c, Q, m, n, G = cp.b_c, p.Q, p.m, p.n, p.Gamma
    e2 = p.eta**2
    md = u.max_degree
    nv = u.nvar
    lat = cp.lattice

    # kinetics: Gamma (2Q uv + (b/Q) u^2 + u^2 v) * (1, -1/eta^2), b = b_c (1 + mu)
    uu = u * u
    kin = (u * v).scale(2 * Q) + uu.scale(b_c / Q).times_mu_power(1.0, 1) + uu * v
    # linear shift: Gamma b_c mu [[1, 0], [-1/eta^2, 0]] w
    lin_u = u.times_mu().scale(G * b_c)
    fu = kin.scale(G) + lin_u
    fv = kin.scale(-G / e2) + lin_u.scale(-1.0 / e2)

    # nonlinear diffusion: Lap sum_k c_k w^k (+ D22 ((1+mu)^n - 1) Lap v)
    dif_u = Series(nv, md)
    pw = u
    for k in range(2, md + 1):
        pw = pw * u
        ck = _binom(m + 1, k) * Q ** (m + 1 - k)
        if ck != 0.0:
            dif_u = dif_u + pw.scale(ck)
    dif_v = Series(nv, md)
    # (1 + mu)^n - 1 part of the linear diffusion of v
    d22 = (n + 1) / e2 * (b_c / Q) ** n
    shifted = v.times_mu_power(n)
    for (mono, mode), c in v.terms.items():
        shifted.add_term(mono, mode, -c)
    dif_v = dif_v + shifted.scale(d22)
    pw = v
    for k in range(2, md + 1):
        pw = pw * v
        ck = _binom(n + 1, k) / e2 * (b_c / Q) ** (n + 1 - k)
        if ck != 0.0:
            dif_v = dif_v + pw.scale(ck).times_mu_power(n + 1 - k)
    fu = fu + dif_u.laplacian(lat)
    fv = fv + dif_v.laplacian(lat)
    return fu, fv


def amplitude_expansion(cp: CriticalPoint, max_degree: int = 3, rho_scale: float = 1.0) -> Expansion:
    """Graded center-manifold expansion up to ``max_degree`` (amplitudes 1, mu 2)."""
    p = cp.params
    ker = critical_kernels(p, cp.b_c, cp.k2, rho_scale=rho_scale)
    nvar = len(cp.modes)
    crit_index = {mode: i for i, mode in enumerate(cp.modes)}
    u = Series(nvar, max_degree)
    v = Series(nvar, max_degree)
    for i, mode in enumerate(cp.modes):
        u.add_term(_unit_mono(nvar, i), mode, ker.rho[0])
        v.add_term(_unit_mono(nvar, i), mode, ker.rho[1])
    g: list[dict] = [dict() for _ in range(nvar)]
    lin = linstab.linearize(p, cp.b_c)
    G = p.Gamma
    solv = {}

    mat_cache: dict = {}

    def matrix(mode):
        if mode not in mat_cache:
            mat_cache[mode] = G * lin.K - cp.lattice.k2(mode) * lin.D
        return mat_cache[mode]

    for d in range(2, max_degree + 1):
        fu, fv = _nonlinear_rhs(cp, u, v)
        fu, fv = fu.of_degree(d), fv.of_degree(d)
        # subtract sum_i (dh/da_i) g_i at degree d (h = w minus its linear part)
        hu = Series(nvar, max_degree, {k: c for k, c in u.terms.items() if u.degree(k[0]) >= 2})
        hv = Series(nvar, max_degree, {k: c for k, c in v.terms.items() if v.degree(k[0]) >= 2})
        for i in range(nvar):
            if not g[i]:
                continue
            fu = fu + hu.d_da(i).times_poly(g[i]).of_degree(d).scale(-1.0)
            fv = fv + hv.d_da(i).times_poly(g[i]).of_degree(d).scale(-1.0)
        keys = set(fu.terms) | set(fv.terms)
        for key in sorted(keys):
            mono, mode = key
            S = np.array([fu.terms.get(key, 0.0), fv.terms.get(key, 0.0)])
            if mode in crit_index:
                i = crit_index[mode]
                gi = float(ker.psi_adj @ S) / float(ker.psi_adj @ ker.rho)
                if d == 2 and not _is_resonant(cp):
                    solv[key] = gi
                    if abs(gi) > 1e-10 * max(1.0, np.max(np.abs(S))):
                        raise SolvabilityError(f"secular term at second order for {key}: {gi:.3e}")
                    gi = 0.0
                if gi != 0.0:
                    g[i][mono] = g[i].get(mono, 0.0) + gi
                rhs = ker.rho * gi - S
                h = solve_harmonic(matrix(mode), rhs, ker)
            else:
                h = solve_harmonic(matrix(mode), -S)
            u.add_term(mono, mode, float(h[0]))
            v.add_term(mono, mode, float(h[1]))
    return Expansion(cp=cp, kernels=ker, max_degree=max_degree, u=u, v=v, g=g,
                     solvability_residuals=solv)


def _is_resonant(cp: CriticalPoint) -> bool:
    if len(cp.modes) != 2:
        return False
    (p1, q1), (p2, q2) = cp.modes
    lat = cp.lattice
    f1, f2 = p1 * p1 * lat.kx2, p2 * p2 * lat.kx2
    s1, s2 = q1 * q1 * lat.ky2, q2 * q2 * lat.ky2

    def close(a, b):
        return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))

    for (fa, sa), (fb, sb) in (((f1, s1), (f2, s2)), ((f2, s2), (f1, s1))):
        if close(fa, 4 * fb) and sa == 0 and sb != 0:
            return True
        if close(sa, 4 * sb) and fa == 0 and fb != 0:
            return True
    return False


# --------------------------------------------------------------------------
# amplitude models


KINDS = ("cubic_SL", "GL", "quintic_SL", "coupled", "resonant")


@dataclass
class AmplitudeModel:
    """Amplitude equation with named coefficients in scaled variables.

    ``amplitude_scale`` converts the scaled amplitude ``A`` to the physical
    modal amplitude ``a = amplitude_scale * A`` (the field is
    ``w ~ a rho cos(...)``); ``T = eps^2 t`` throughout.
    """

    kind: str
    coefficients: dict[str, float]
    eps: float | None = None
    b_c: float | None = None
    k2: float | None = None
    rho: np.ndarray | None = None
    psi_adj: np.ndarray | None = None
    w21: np.ndarray | None = None
    modes: tuple = ()
    raw: dict = field(default_factory=dict)
    expansion: Expansion | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = {
            "cubic_SL": {"sigma", "L"},
            "GL": {"sigma", "L", "nu"},
            "quintic_SL": {"sigma_bar", "L_bar", "R_bar"},
            "coupled": {"sigma", "L1", "L2", "R1", "R2"},
            "resonant": {"sigma1", "sigma2", "L1", "L2", "R1", "R2", "S1", "S2"},
        }
        if self.kind not in expected:
            raise ValueError(f"unknown amplitude-equation kind {self.kind!r}")
        if set(self.coefficients) != expected[self.kind]:
            raise ValueError(f"{self.kind} needs coefficients {sorted(expected[self.kind])}, "
                             f"got {sorted(self.coefficients)}")

    @property
    def amplitude_scale(self) -> float:
        if self.eps is None:
            return 1.0
        return self.eps**2 if self.kind == "resonant" else self.eps

    def rhs(self, A: np.ndarray) -> np.ndarray:
        """Right-hand side of the (spatially uniform) amplitude equations."""
        c = self.coefficients
        A = np.asarray(A, dtype=float)
        if self.kind in ("cubic_SL", "GL"):
            return c["sigma"] * A - c["L"] * A**3
        if self.kind == "quintic_SL":
            return c["sigma_bar"] * A - c["L_bar"] * A**3 + c["R_bar"] * A**5
        A1, A2 = A
        if self.kind == "coupled":
            return np.array([c["sigma"] * A1 - c["L1"] * A1**3 + c["R1"] * A1 * A2**2,
                             c["sigma"] * A2 - c["L2"] * A2**3 + c["R2"] * A1**2 * A2])
        return np.array([c["sigma1"] * A1 - c["L1"] * A1 * A2 + c["R1"] * A1 * A2**2 + c["S1"] * A1**3,
                         c["sigma2"] * A2 - c["L2"] * A1**2 + c["R2"] * A1**2 * A2 + c["S2"] * A2**3])

    def jacobian(self, A: np.ndarray) -> np.ndarray:
        c = self.coefficients
        A = np.atleast_1d(np.asarray(A, dtype=float))
        if self.kind in ("cubic_SL", "GL"):
            return np.array([[c["sigma"] - 3 * c["L"] * A[0] ** 2]])
        if self.kind == "quintic_SL":
            x = A[0]
            return np.array([[c["sigma_bar"] - 3 * c["L_bar"] * x**2 + 5 * c["R_bar"] * x**4]])
        A1, A2 = A
        if self.kind == "coupled":
            return np.array([
                [c["sigma"] - 3 * c["L1"] * A1**2 + c["R1"] * A2**2, 2 * c["R1"] * A1 * A2],
                [2 * c["R2"] * A1 * A2, c["sigma"] - 3 * c["L2"] * A2**2 + c["R2"] * A1**2]])
        return np.array([
            [c["sigma1"] - c["L1"] * A2 + c["R1"] * A2**2 + 3 * c["S1"] * A1**2,
             -c["L1"] * A1 + 2 * c["R1"] * A1 * A2],
            [-2 * c["L2"] * A1 + 2 * c["R2"] * A1 * A2,
             c["sigma2"] + c["R2"] * A1**2 + 3 * c["S2"] * A2**2]])

    def to_json(self) -> dict:
        out = {"kind": self.kind, "coefficients": dict(self.coefficients), "eps": self.eps,
               "b_c": self.b_c, "k2": self.k2, "modes": [list(m) for m in self.modes],
               "raw": {k: v for k, v in self.raw.items()}, "diagnostics": self.diagnostics}
        for name in ("rho", "psi_adj", "w21"):
            val = getattr(self, name)
            if val is not None:
                out[name] = [float(x) for x in val]
        if self.expansion is not None:
            out["w2_harmonics"] = [
                {"mono": list(mono), "mode": list(mode), "u": cu, "v": cv}
                for mono, mode, (cu, cv) in self.expansion.field_terms(2)
                if self.expansion.u.degree(mono) == 2]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "AmplitudeModel":
        arr = {k: (np.array(data[k]) if data.get(k) is not None else None) for k in ("rho", "psi_adj", "w21")}
        return cls(kind=data["kind"], coefficients={k: float(v) for k, v in data["coefficients"].items()},
                   eps=data.get("eps"), b_c=data.get("b_c"), k2=data.get("k2"),
                   modes=tuple(tuple(m) for m in data.get("modes", [])),
                   raw=dict(data.get("raw", {})), diagnostics=dict(data.get("diagnostics", {})), **arr)


def _eps_of(p: NondimParams, b_c: float, eps: float | None) -> float | None:
    if eps is not None:
        return float(eps)
    mu = (p.b - b_c) / b_c
    return math.sqrt(mu) if mu > 0 else None


def _diag(exp: Expansion) -> dict:
    r1, r2 = exp.kernels.residuals
    solv = max((abs(x) for x in exp.solvability_residuals.values()), default=0.0)
    return {"kernel_residual": r1, "adjoint_residual": r2, "second_order_solvability": solv}


def stuart_landau_coeffs(p: NondimParams, modeset: ModeSet | None = None, eps: float | None = None,
                         rho_scale: float = 1.0) -> AmplitudeModel:
    """Cubic Stuart-Landau coefficients: ``dA/dT = sigma A - L A^3``."""
    if modeset is not None and modeset.multiplicity != 1:
        raise ValueError("Stuart-Landau reduction needs a simple critical eigenvalue")
    cp = critical_point(p, modeset)
    ex = amplitude_expansion(cp, 3, rho_scale=rho_scale)
    sigma = ex.coefficient(0, (1, 1))
    L = -ex.coefficient(0, (3, 0))
    return AmplitudeModel("cubic_SL", {"sigma": sigma, "L": L}, eps=_eps_of(p, cp.b_c, eps),
                          b_c=cp.b_c, k2=cp.k2, rho=ex.kernels.rho, psi_adj=ex.kernels.psi_adj,
                          modes=cp.modes, raw={"sigma": sigma, "L": L}, expansion=ex, diagnostics=_diag(ex))


def gl_w21(p: NondimParams, b_c: float, k2: float, ker: KernelPair) -> np.ndarray:
    lin = linstab.linearize(p, b_c)
    kc = math.sqrt(k2)
    return solve_harmonic(ker.matrix, -2.0 * kc * lin.D @ ker.rho, ker)


def ginzburg_landau_coeffs(p: NondimParams, eps: float | None = None, rho_scale: float = 1.0) -> AmplitudeModel:
    """Real Ginzburg-Landau coefficients: ``A_T = nu A_XX + sigma A - L A^3`` (``X = eps x``)."""
    sl = stuart_landau_coeffs(p, eps=eps, rho_scale=rho_scale)
    ker = sl.expansion.kernels
    lin = linstab.linearize(p, sl.b_c)
    w21 = gl_w21(p, sl.b_c, sl.k2, ker)
    kc = math.sqrt(sl.k2)
    D = lin.D
    # <D rho, psi> vanishes at the minimum of the neutral curve; kept for exactness
    nu = float(ker.psi_adj @ (D @ ker.rho - 2.0 * kc * D @ w21)) / float(ker.psi_adj @ ker.rho)
    c = dict(sl.coefficients, nu=nu)
    diag = dict(sl.diagnostics, w21_residual=float(np.max(np.abs(ker.matrix @ w21 + 2 * kc * D @ ker.rho))),
                D_rho_psi=float(ker.psi_adj @ D @ ker.rho))
    return AmplitudeModel("GL", c, eps=sl.eps, b_c=sl.b_c, k2=sl.k2, rho=ker.rho, psi_adj=ker.psi_adj,
                          w21=w21, modes=sl.modes, raw=dict(sl.raw, nu=nu), expansion=sl.expansion,
                          diagnostics=diag)


def quintic_coeffs(p: NondimParams, modeset: ModeSet | None = None, eps: float | None = None) -> AmplitudeModel:
    """Quintic Stuart-Landau ``dA/dT = sigma_bar A - L_bar A^3 + R_bar A^5``.

    The raw expansion is ``da/dt = (mu s + mu^2 s2) a - (L + mu L2) a^3 + R a^5``
    in the physical amplitude; with ``a = eps A``: ``sigma_bar = s + eps^2 s2``,
    ``L_bar = L + eps^2 L2``, ``R_bar = eps^2 R``.
    """
    cp = critical_point(p, modeset)
    ex = amplitude_expansion(cp, 5)
    s = ex.coefficient(0, (1, 1))
    s2 = ex.coefficient(0, (1, 2))
    L = -ex.coefficient(0, (3, 0))
    L2 = -ex.coefficient(0, (3, 1))
    R = ex.coefficient(0, (5, 0))
    e = _eps_of(p, cp.b_c, eps)
    e2 = 0.0 if e is None else e * e
    coeffs = {"sigma_bar": s + e2 * s2, "L_bar": L + e2 * L2, "R_bar": e2 * R}
    diag = _diag(ex)
    warn = []
    if L >= 0:
        warn.append("cubic coefficient L >= 0: bifurcation is supercritical")
    if not (coeffs["sigma_bar"] > 0 and coeffs["L_bar"] < 0 and coeffs["R_bar"] < 0):
        warn.append("coefficients outside the bistable sign pattern sigma_bar>0, L_bar<0, R_bar<0")
    diag["warnings"] = warn
    return AmplitudeModel("quintic_SL", coeffs, eps=e, b_c=cp.b_c, k2=cp.k2, rho=ex.kernels.rho,
                          psi_adj=ex.kernels.psi_adj, modes=cp.modes,
                          raw={"sigma": s, "sigma2": s2, "L": L, "L2": L2, "R": R},
                          expansion=ex, diagnostics=diag)


def coupled_landau_coeffs(p: NondimParams, modeset: ModeSet, eps: float | None = None) -> AmplitudeModel:
    """Two coupled Landau equations for a double, non-resonant eigenvalue."""
    if modeset.multiplicity != 2:
        raise ValueError("coupled Landau equations need a double eigenvalue")
    if modeset.resonance != "none":
        raise ValueError("resonant mode pair: use resonant_coeffs")
    cp = critical_point(p, modeset)
    ex = amplitude_expansion(cp, 3)
    sig1 = ex.coefficient(0, (1, 0, 1))
    sig2 = ex.coefficient(1, (0, 1, 1))
    coeffs = {"sigma": sig1,
              "L1": -ex.coefficient(0, (3, 0, 0)), "L2": -ex.coefficient(1, (0, 3, 0)),
              "R1": ex.coefficient(0, (1, 2, 0)), "R2": ex.coefficient(1, (2, 1, 0))}
    expected = {0: {(1, 0, 1), (3, 0, 0), (1, 2, 0)}, 1: {(0, 1, 1), (0, 3, 0), (2, 1, 0)}}
    extra = {f"g{i}{mono}": c for i in (0, 1) for mono, c in ex.g[i].items()
             if mono not in expected[i] and abs(c) > 1e-9 * max(1.0, abs(sig1))}
    diag = dict(_diag(ex), sigma_mismatch=abs(sig1 - sig2), off_structure_terms=extra)
    return AmplitudeModel("coupled", coeffs, eps=_eps_of(p, cp.b_c, eps), b_c=cp.b_c, k2=cp.k2,
                          rho=ex.kernels.rho, psi_adj=ex.kernels.psi_adj, modes=cp.modes,
                          raw=dict(coeffs), expansion=ex, diagnostics=diag)


def resonant_coeffs(p: NondimParams, modeset: ModeSet, eps: float | None = None) -> AmplitudeModel:
    """Amplitude system for a resonant double eigenvalue (hexagons).

    Raw physical-amplitude form::

        da1/dt = mu s1 a1 - (l1 + mu l1') a1 a2 + r1 a1 a2^2 + s1' a1^3
        da2/dt = mu s2 a2 - (l2 + mu l2') a1^2 + r2 a1^2 a2 + s2' a2^3

    With ``a = eps^2 A`` and ``T = eps^2 t`` the named coefficients are
    ``sigma_i = s_i``, ``L_i = l_i + eps^2 l_i'``, ``R_i = eps^2 r_i``,
    ``S_i = eps^2 s_i'``.
    """
    if modeset.multiplicity != 2 or modeset.resonance != "resonant":
        raise ValueError("resonant_coeffs needs a resonant double eigenvalue")
    cp = critical_point(p, modeset)
    if not _is_resonant(cp):
        raise ValueError("mode pair does not satisfy the resonance condition")
    ex = amplitude_expansion(cp, 4)
    c = ex.coefficient
    raw = {"sigma1": c(0, (1, 0, 1)), "sigma2": c(1, (0, 1, 1)),
           "L1": -c(0, (1, 1, 0)), "L2": -c(1, (2, 0, 0)),
           "L1_mu": -c(0, (1, 1, 1)), "L2_mu": -c(1, (2, 0, 1)),
           "R1": c(0, (1, 2, 0)), "R2": c(1, (2, 1, 0)),
           "S1": c(0, (3, 0, 0)), "S2": c(1, (0, 3, 0))}
    e = _eps_of(p, cp.b_c, eps)
    e2 = 0.0 if e is None else e * e
    coeffs = {"sigma1": raw["sigma1"], "sigma2": raw["sigma2"],
              "L1": raw["L1"] + e2 * raw["L1_mu"], "L2": raw["L2"] + e2 * raw["L2_mu"],
              "R1": e2 * raw["R1"], "R2": e2 * raw["R2"], "S1": e2 * raw["S1"], "S2": e2 * raw["S2"]}
    used = {0: {(1, 0, 1), (1, 1, 0), (1, 1, 1), (1, 2, 0), (3, 0, 0)},
            1: {(0, 1, 1), (2, 0, 0), (2, 0, 1), (2, 1, 0), (0, 3, 0)}}
    dropped = {f"g{i}{mono}": v for i in (0, 1) for mono, v in ex.g[i].items()
               if mono not in used[i] and ex.u.degree(mono) <= 4}
    diag = dict(_diag(ex), dropped_quartic_terms=dropped)
    return AmplitudeModel("resonant", coeffs, eps=e, b_c=cp.b_c, k2=cp.k2, rho=ex.kernels.rho,
                          psi_adj=ex.kernels.psi_adj, modes=cp.modes, raw=raw, expansion=ex,
                          diagnostics=diag)


# --------------------------------------------------------------------------
# reconstruction


def wnl_solution(model: AmplitudeModel, amplitudes, x, y=None, order: int = 1,
                 params: NondimParams | None = None, mu: float | None = None):
    """Approximate ``(u, v)`` from scaled amplitudes.

    ``order=1`` keeps ``eps rho sum A_i c_i``; ``order=2`` adds the degree-two
    corrections (mean shift and second harmonics). Coordinates are physical;
    for a 1D unbounded-domain model the planform is ``cos(k_c x)``. The
    steady state at ``b = b_c (1 + mu)`` is added when ``params`` is given.
    """
    if model.expansion is None:
        raise ValueError("model carries no field expansion")
    ex = model.expansion
    lat = ex.cp.lattice
    amps = np.atleast_1d(np.asarray(amplitudes, dtype=float)) * model.amplitude_scale
    if mu is None:
        mu = 0.0 if model.eps is None else model.eps**2
    X = np.asarray(x, dtype=float)
    Y = None if y is None else np.asarray(y, dtype=float)
    u = np.zeros(np.broadcast(X, Y).shape if Y is not None else X.shape)
    v = np.zeros_like(u)
    for mono, (pp, qq), (cu, cv) in ex.field_terms(order):
        w = float(np.prod([a**e for a, e in zip(amps, mono[:-1])])) * mu ** mono[-1]
        if w == 0.0:
            continue
        shape = np.cos(pp * lat.kx * X)
        if qq:
            if Y is None:
                raise ValueError("2D planform needs y coordinates")
            shape = shape * np.cos(qq * lat.ky * Y)
        u = u + w * cu * shape
        v = v + w * cv * shape
    if params is not None:
        b = model.b_c * (1 + mu)
        u = u + params.Q
        v = v + b / params.Q
    return u, v
