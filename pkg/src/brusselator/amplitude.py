"""Integration, equilibria and bifurcation diagrams of the amplitude equations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .wnl import AmplitudeModel

MARGINAL_TOL = 1e-10


class DegenerateCoefficients(ValueError):
    pass


class NoSaddleNode(RuntimeError):
    pass


@dataclass
class Trajectory:
    T: np.ndarray
    A: np.ndarray  # (len(T), dim) for ODE kinds; (len(T), nX) for GL
    diverged: bool = False
    X: np.ndarray | None = None
    message: str = ""

    @property
    def final(self) -> np.ndarray:
        return self.A[-1]


@dataclass
class Equilibrium:
    values: np.ndarray
    stability: str  # stable | unstable | saddle | marginal
    eigenvalues: np.ndarray
    label: str = ""
    residual: float = 0.0


@dataclass
class Branch:
    b: np.ndarray
    amplitude: np.ndarray
    stable: np.ndarray


@dataclass
class BifurcationDiagram:
    b_c: float
    b_s: float | None
    branches: dict[str, Branch] = field(default_factory=dict)
    mu_s: float | None = None


def classify(eigs: np.ndarray, tol: float = MARGINAL_TOL) -> str:
    re = np.real(np.asarray(eigs))
    if np.any(np.abs(re) <= tol):
        return "marginal"
    if np.all(re < 0):
        return "stable"
    if np.all(re > 0):
        return "unstable"
    return "saddle"


# --------------------------------------------------------------------------
# integration


def integrate_amplitude(model: AmplitudeModel, init, T_end: float, n_out: int = 201,
                        bound: float = 1e6, rtol: float = 1e-9, atol: float = 1e-12,
                        X: np.ndarray | None = None) -> Trajectory:
    """Integrate an amplitude equation from ``init`` to ``T_end``.

    ODE kinds use an embedded Runge-Kutta 8(5,3) pair. For ``GL`` pass the
    slow-scale grid ``X`` (uniform, cell-centred); the second
    derivative uses central differences with mirrored ghost points (no flux).
    Blow-up beyond ``bound`` stops the run with ``diverged=True``.
    """
    if model.kind == "GL":
        if X is None:
            raise ValueError("GL integration needs a slow-scale grid X")
        return _integrate_gl(model, np.asarray(init, dtype=float), np.asarray(X, dtype=float), T_end,
                             n_out, bound, rtol, atol)
    y0 = np.atleast_1d(np.asarray(init, dtype=float))
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial amplitude must be finite")

    def blowup(t, y):
        return bound - float(np.max(np.abs(y)))

    blowup.terminal = True
    sol = solve_ivp(lambda t, y: np.atleast_1d(model.rhs(y if y.size > 1 else y[0])), (0.0, T_end), y0,
                    method="DOP853", rtol=rtol, atol=atol, t_eval=np.linspace(0.0, T_end, n_out),
                    events=blowup)
    diverged = sol.status == 1
    T = sol.t
    A = sol.y.T
    if diverged:
        T = np.append(T, sol.t_events[0])
        A = np.vstack([A, sol.y_events[0]])
    return Trajectory(T=T, A=A, diverged=diverged, message=sol.message)


def _gl_second_difference(A: np.ndarray, h: float) -> np.ndarray:
    # cell-centred grid: the ghost mirrors the boundary cell, so the face flux vanishes
    padded = np.concatenate([A[:1], A, A[-1:]])
    return (padded[2:] - 2.0 * A + padded[:-2]) / (h * h)


def _integrate_gl(model, A0, X, T_end, n_out, bound, rtol, atol) -> Trajectory:
    c = model.coefficients
    nu, sig, L = c["nu"], c["sigma"], c["L"]
    if A0.shape != X.shape:
        raise ValueError("initial envelope and grid differ in shape")
    h = float(X[1] - X[0])
    if not np.allclose(np.diff(X), h, rtol=1e-9, atol=0):
        raise ValueError("GL grid must be uniform")

    def rhs(t, A):
        return nu * _gl_second_difference(A, h) + sig * A - L * A**3

    def blowup(t, y):
        return bound - float(np.max(np.abs(y)))

    blowup.terminal = True
    # stability of the explicit pair dominates for fine grids; let the controller find it
    sol = solve_ivp(rhs, (0.0, T_end), A0, method="RK45", rtol=min(rtol * 10, 1e-7), atol=atol,
                    t_eval=np.linspace(0.0, T_end, n_out), events=blowup)
    return Trajectory(T=sol.t, A=sol.y.T, diverged=sol.status == 1, X=X, message=sol.message)


# --------------------------------------------------------------------------
# equilibria


def sl_equilibrium(model: AmplitudeModel) -> Equilibrium:
    """Nontrivial equilibrium ``A = sqrt(sigma/L)`` of the cubic equation (or the origin if sigma = 0)."""
    if model.kind not in ("cubic_SL", "GL"):
        raise ValueError("sl_equilibrium needs a cubic Stuart-Landau model")
    s, L = model.coefficients["sigma"], model.coefficients["L"]
    if L == 0:
        raise DegenerateCoefficients("L = 0: cubic equation has no saturating term")
    if s == 0:
        A = 0.0
    elif s / L < 0:
        raise DegenerateCoefficients("sigma/L < 0: no nontrivial equilibrium")
    else:
        A = math.sqrt(s / L)
    eig = np.array([s - 3.0 * L * A * A])
    return Equilibrium(np.array([A]), classify(eig), eig, "A_inf",
                       float(abs(model.rhs(np.array(A)))))


def _term_scale(model: AmplitudeModel, vals: np.ndarray) -> float:
    """Largest magnitude among the individual terms of the stationarity equations."""
    c = {k: abs(v) for k, v in model.coefficients.items()}
    a = np.abs(vals)
    if model.kind == "coupled":
        x, y = a
        terms = [c["sigma"] * x, c["L1"] * x**3, c["R1"] * x * y * y,
                 c["sigma"] * y, c["L2"] * y**3, c["R2"] * x * x * y]
    elif model.kind == "resonant":
        x, y = a
        terms = [c["sigma1"] * x, c["L1"] * x * y, c["R1"] * x * y * y, c["S1"] * x**3,
                 c["sigma2"] * y, c["L2"] * x * x, c["R2"] * x * x * y, c["S2"] * y**3]
    else:
        terms = [abs(float(model.rhs(a[0])))]
    return max(1.0, max(terms))


def _equilibrium(model: AmplitudeModel, vals, label: str) -> Equilibrium:
    """Equilibrium record; ``residual`` is relative to the largest term of the system."""
    vals = np.asarray(vals, dtype=float)
    J = model.jacobian(vals)
    eig = np.linalg.eigvals(J)
    res = float(np.max(np.abs(np.atleast_1d(model.rhs(vals if vals.size > 1 else vals[0])))))
    return Equilibrium(vals, classify(eig), eig, label, res / _term_scale(model, vals))


def coupled_equilibria(model: AmplitudeModel) -> list[Equilibrium]:
    """Origin, the two pure-mode axes and the mixed mode of the coupled Landau system."""
    if model.kind != "coupled":
        raise ValueError("coupled_equilibria needs a coupled model")
    c = model.coefficients
    s, L1, L2, R1, R2 = c["sigma"], c["L1"], c["L2"], c["R1"], c["R2"]
    out = [_equilibrium(model, [0.0, 0.0], "origin")]
    for i, Li in ((0, L1), (1, L2)):
        if Li != 0 and s / Li > 0:
            a = math.sqrt(s / Li)
            for sign in (1, -1):
                v = [0.0, 0.0]
                v[i] = sign * a
                out.append(_equilibrium(model, v, f"axis{i + 1}{'+' if sign > 0 else '-'}"))
    # L1 x - R1 y = s, -R2 x + L2 y = s with x = A1^2, y = A2^2
    det = L1 * L2 - R1 * R2
    if det != 0:
        x = s * (L2 + R1) / det
        y = s * (L1 + R2) / det
        if x > 0 and y > 0:
            for s1 in (1, -1):
                for s2 in (1, -1):
                    out.append(_equilibrium(model, [s1 * math.sqrt(x), s2 * math.sqrt(y)],
                                            f"mixed{'+' if s1 > 0 else '-'}{'+' if s2 > 0 else '-'}"))
    return out


def hexagon_cubic(model: AmplitudeModel) -> np.ndarray:
    """Coefficients (highest first) of the cubic satisfied by ``A2`` on the mixed branch.

    Eliminating ``A1^2 = (-R1 A2^2 + L1 A2 - sigma1) / S1`` from the second
    stationarity equation ``sigma2 A2 + (R2 A2 - L2) A1^2 + S2 A2^3 = 0``.
    """
    c = model.coefficients
    s1, s2, L1, L2, R1, R2, S1, S2 = (c[k] for k in ("sigma1", "sigma2", "L1", "L2", "R1", "R2", "S1", "S2"))
    # S1 sigma2 A2 + (R2 A2 - L2)(-R1 A2^2 + L1 A2 - s1) + S1 S2 A2^3 = 0
    return np.array([S1 * S2 - R1 * R2,
                     R2 * L1 + L2 * R1,
                     S1 * s2 - R2 * s1 - L2 * L1,
                     L2 * s1])


def _cubic_real_roots(coef: np.ndarray) -> np.ndarray:
    """Real roots of a cubic (degree may drop) via the trigonometric/Cardano route."""
    a, b, c, d = (float(x) for x in coef)
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if scale == 0:
        raise DegenerateCoefficients("cubic for A2 vanishes identically")
    if abs(a) <= 1e-14 * scale:
        if abs(b) <= 1e-14 * scale:
            return np.array([-d / c]) if c != 0 else np.array([])
        disc = c * c - 4 * b * d
        if disc < 0:
            return np.array([])
        sq = math.sqrt(disc)
        return np.array([(-c + sq) / (2 * b), (-c - sq) / (2 * b)])
    b, c, d = b / a, c / a, d / a
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0:
        sq = math.sqrt(disc)
        roots = [math.copysign(abs(-q / 2 + sq) ** (1 / 3), -q / 2 + sq)
                 + math.copysign(abs(-q / 2 - sq) ** (1 / 3), -q / 2 - sq)]
    elif p == 0:
        roots = [0.0]
    else:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        th = math.acos(arg) / 3.0
        roots = [r * math.cos(th - 2.0 * math.pi * k / 3.0) for k in range(3)]
    out = []
    for x in roots:
        x += shift
        # one Newton polish on the original polynomial
        f = ((x + b) * x + c) * x + d
        fp = (3 * x + 2 * b) * x + c
        if fp != 0:
            x -= f / fp
        out.append(x)
    return np.array(sorted(out))


def hexagon_equilibria(model: AmplitudeModel) -> list[Equilibrium]:
    """Roll states ``R^+-`` and the mixed (hexagon) states ``H^+-_i`` of the resonant system."""
    if model.kind != "resonant":
        raise ValueError("hexagon_equilibria needs a resonant model")
    c = model.coefficients
    if c["S1"] == 0 or c["S2"] == 0:
        raise DegenerateCoefficients("S1 or S2 vanishes")
    out = [_equilibrium(model, [0.0, 0.0], "origin")]
    r2 = -c["sigma2"] / c["S2"]
    if r2 > 0:
        out.append(_equilibrium(model, [0.0, math.sqrt(r2)], "R+"))
        out.append(_equilibrium(model, [0.0, -math.sqrt(r2)], "R-"))
    roots = _cubic_real_roots(hexagon_cubic(model))
    idx = 0
    for A2 in roots:
        x = (-c["R1"] * A2 * A2 + c["L1"] * A2 - c["sigma1"]) / c["S1"]
        if x < 0:
            continue
        idx += 1
        if x == 0:
            continue
        for sign in (1, -1):
            eq = _equilibrium(model, [sign * math.sqrt(x), A2], f"H{'+' if sign > 0 else '-'}{idx}")
            out.append(eq)
    return out


# --------------------------------------------------------------------------
# subcritical quintic branch


def _quintic_raw(model: AmplitudeModel) -> dict:
    if model.kind != "quintic_SL":
        raise ValueError("needs a quintic Stuart-Landau model")
    return model.raw


def quintic_rhs(raw: dict, mu: float, a):
    """Physical-amplitude quintic equation at ``mu = (b - b_c)/b_c``."""
    return ((mu * raw["sigma"] + mu * mu * raw["sigma2"]) * a
            - (raw["L"] + mu * raw["L2"]) * a**3 + raw["R"] * a**5)


def quintic_branches(raw: dict, mu: float) -> list[tuple[float, bool]]:
    """Nonnegative equilibria ``a`` at ``mu`` with stability flags."""
    s = mu * raw["sigma"] + mu * mu * raw["sigma2"]
    Lm = raw["L"] + mu * raw["L2"]
    R = raw["R"]
    out = [(0.0, s < 0)]
    # R x^2 - Lm x + s = 0, x = a^2
    disc = Lm * Lm - 4.0 * R * s
    if disc < 0:
        return out
    sq = math.sqrt(disc)
    for x in ((Lm + sq) / (2 * R), (Lm - sq) / (2 * R)):
        if x > 0:
            a = math.sqrt(x)
            d = s - 3 * Lm * x + 5 * R * x * x
            out.append((a, d < 0))
    return out


def saddle_node_mu(raw: dict, mu_min: float = -0.5) -> float:
    """``mu_s < 0`` where the two nonzero branches coalesce (discriminant zero)."""
    def disc(mu):
        s = mu * raw["sigma"] + mu * mu * raw["sigma2"]
        Lm = raw["L"] + mu * raw["L2"]
        return Lm * Lm - 4.0 * raw["R"] * s

    def valid(mu):
        # coalescence at positive a^2
        Lm = raw["L"] + mu * raw["L2"]
        return Lm / raw["R"] > 0

    if raw["L"] >= 0 or raw["R"] >= 0:
        raise NoSaddleNode("needs L < 0 and R < 0 (subcritical with quintic saturation)")
    hi = 0.0  # disc(0) = L^2 > 0
    grid = -np.geomspace(1e-12, abs(mu_min), 400)
    for lo in grid:
        if disc(lo) < 0 and valid(lo):
            return brentq(disc, lo, hi, xtol=1e-16, rtol=1e-15)
        hi = lo
    raise NoSaddleNode(f"no saddle node for mu in [{mu_min}, 0)")


def quintic_diagram(model: AmplitudeModel, b_values=None, n: int = 201) -> BifurcationDiagram:
    """Bifurcation diagram of the physical amplitude ``a`` versus ``b``."""
    raw = _quintic_raw(model)
    b_c = model.b_c
    try:
        mu_s = saddle_node_mu(raw)
        b_s = b_c * (1.0 + mu_s)
    except NoSaddleNode:
        mu_s = b_s = None
    if b_values is None:
        span = 2.0 * abs(mu_s) if mu_s is not None else 1e-2
        b_values = b_c * (1.0 + np.linspace(-span, span, n))
    b_values = np.asarray(b_values, dtype=float)
    origin, upper, lower = [], [], []
    for b in b_values:
        mu = (b - b_c) / b_c
        eqs = quintic_branches(raw, mu)
        origin.append((b, 0.0, eqs[0][1]))
        nz = sorted(eqs[1:], key=lambda t: t[0])
        if len(nz) == 2:
            lower.append((b, nz[0][0], nz[0][1]))
            upper.append((b, nz[1][0], nz[1][1]))
        elif len(nz) == 1:
            upper.append((b, nz[0][0], nz[0][1]))

    def mk(rows):
        if not rows:
            return Branch(np.zeros(0), np.zeros(0), np.zeros(0, bool))
        arr = list(zip(*rows))
        return Branch(np.array(arr[0]), np.array(arr[1]), np.array(arr[2], dtype=bool))

    return BifurcationDiagram(b_c=b_c, b_s=b_s, mu_s=mu_s,
                              branches={"origin": mk(origin), "upper": mk(upper), "lower": mk(lower)})


@dataclass
class HysteresisTrace:
    b_path: np.ndarray
    final_amplitude: np.ndarray
    t: np.ndarray
    b_t: np.ndarray
    a_t: np.ndarray
    phases: list[str]


def hysteresis_sweep(model: AmplitudeModel, b_path, t_phase: float | None = None, seed: float = 1e-6,
                     n_out: int = 200) -> HysteresisTrace:
    """Integrate the physical-amplitude quintic equation through a sequence of ``b`` values.

    Each phase starts from the previous end state; amplitudes below ``seed``
    are raised to ``seed`` to stand in for background noise. The phase
    length defaults to 50 linear time scales ``1/|mu sigma|`` of the first
    off-threshold phase.
    """
    raw = _quintic_raw(model)
    b_c = model.b_c
    b_path = np.asarray(b_path, dtype=float)
    mus = (b_path - b_c) / b_c
    if t_phase is None:
        rate = max(abs(m) * abs(raw["sigma"]) for m in mus if m != 0)
        t_phase = 50.0 / rate
    a = seed
    finals, ts, bs, As, phases = [], [], [], [], []
    t0 = 0.0
    try:
        mu_s = saddle_node_mu(raw)
    except NoSaddleNode:
        mu_s = None
    for b, mu in zip(b_path, mus):
        a = max(abs(a), seed)
        sol = solve_ivp(lambda t, y: quintic_rhs(raw, mu, y), (0.0, t_phase), [a], method="DOP853",
                        rtol=1e-9, atol=1e-14, t_eval=np.linspace(0.0, t_phase, n_out))
        a = float(sol.y[0, -1])
        finals.append(a)
        ts.append(t0 + sol.t)
        bs.append(np.full(sol.t.shape, b))
        As.append(sol.y[0])
        t0 += t_phase
        if mu > 0:
            phases.append("above_bc")
        elif mu_s is not None and mu > mu_s:
            phases.append("bistable")
        else:
            phases.append("below_bs")
    return HysteresisTrace(b_path, np.array(finals), np.concatenate(ts), np.concatenate(bs),
                           np.concatenate(As), phases)
