"""Post-processing: cosine spectra, envelopes, fronts, Bessel cores and field distances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct, dctn, idct, idctn

from .pde import Grid

DOMINANT_FRACTION = 0.05


class AnalysisError(ValueError):
    pass


# --------------------------------------------------------------------------
# spectra


@dataclass
class SpectrumReport:
    """Neumann cosine coefficients of a field.

    ``amplitudes[p, q]`` is the coefficient of ``cos(p pi x/Lx) cos(q pi y/Ly)``
    (so a pure planform ``a cos(...)`` reports ``a``); ``ortho`` holds the
    orthonormal DCT-II coefficients used for the energy identity.
    """

    amplitudes: np.ndarray
    ortho: np.ndarray
    mean: float
    dominant: list[tuple[int, ...]]
    threshold: float
    mean_zeroed: bool = True

    def amplitude(self, index) -> float:
        return float(self.amplitudes[_index(index)])

    def relative(self, index) -> float:
        disp = np.abs(self.amplitudes).copy()
        disp.flat[0] = 0.0
        return float(abs(self.amplitudes[_index(index)]) / disp.max()) if disp.max() > 0 else 0.0


def _index(index) -> tuple[int, ...]:
    # 1D spectra accept a bare integer mode number
    return tuple(int(i) for i in np.atleast_1d(index))


def forward_cosine(f: np.ndarray) -> np.ndarray:
    return dct(f, type=2, norm="ortho") if f.ndim == 1 else dctn(f, type=2, norm="ortho")


def inverse_cosine(c: np.ndarray) -> np.ndarray:
    return idct(c, type=2, norm="ortho") if c.ndim == 1 else idctn(c, type=2, norm="ortho")


def _ortho_to_amplitude(shape) -> np.ndarray:
    facs = []
    for n in shape:
        f = np.full(n, math.sqrt(2.0 / n))
        f[0] = math.sqrt(1.0 / n)
        facs.append(f)
    if len(facs) == 1:
        return facs[0]
    return np.multiply.outer(facs[0], facs[1])


def cosine_spectrum(u: np.ndarray, grid: Grid | None = None, fraction: float = DOMINANT_FRACTION) -> SpectrumReport:
    """Cosine-basis spectrum of ``u`` with the mean mode reported separately and zeroed for display."""
    u = np.asarray(u, dtype=float)
    if grid is not None:
        if grid.kind == "radial":
            raise AnalysisError("cosine spectrum needs a line or rectangle grid")
        if u.shape != grid.shape:
            raise AnalysisError("field shape does not match grid")
    c = forward_cosine(u)
    amp = c * _ortho_to_amplitude(u.shape)
    mean = float(amp.flat[0])
    disp = np.abs(amp)
    disp.flat[0] = 0.0
    top = float(disp.max())
    dominant = []
    if top > 0:
        idx = np.argwhere(disp >= fraction * top)
        order = np.argsort(-disp[tuple(idx.T)])
        dominant = [tuple(int(i) for i in idx[j]) for j in order]
    return SpectrumReport(amplitudes=amp, ortho=c, mean=mean, dominant=dominant, threshold=fraction * top)


def spectrum_energy_defect(u: np.ndarray) -> float:
    """Relative mismatch of the discrete energy identity after removing the mean."""
    c = forward_cosine(np.asarray(u, dtype=float))
    e_field = float(np.sum((u - u.mean()) ** 2))
    e_coef = float(np.sum(c**2) - c.flat[0] ** 2)
    return abs(e_field - e_coef) / max(e_field, 1e-300)


def evaluate_cosine_series(c: np.ndarray, lengths, points) -> np.ndarray:
    """Evaluate the cosine interpolant of orthonormal coefficients ``c`` at arbitrary 1D points."""
    if c.ndim != 1:
        raise AnalysisError("only 1D evaluation is supported")
    (L,) = lengths
    n = c.size
    amp = c * _ortho_to_amplitude((n,))
    k = np.arange(n) * np.pi / L
    return np.cos(np.outer(np.asarray(points, dtype=float), k)) @ amp


# --------------------------------------------------------------------------
# distances


def l1_distance(u_a: np.ndarray, u_b: np.ndarray, grid: Grid) -> float:
    """Quadrature L1 norm of ``u_a - u_b`` on ``grid``."""
    u_a = np.asarray(u_a, dtype=float)
    u_b = np.asarray(u_b, dtype=float)
    if u_a.shape != u_b.shape or u_a.shape != grid.shape:
        raise AnalysisError(f"grid mismatch: {u_a.shape} vs {u_b.shape} on {grid.shape}")
    return float(np.sum(grid.weights * np.abs(u_a - u_b)))


# --------------------------------------------------------------------------
# envelopes and fronts


@dataclass
class Envelope:
    x: np.ndarray
    A: np.ndarray
    kc: float
    method: str = "extrema-interpolation"
    x_max: np.ndarray = field(default_factory=lambda: np.zeros(0))
    a_max: np.ndarray = field(default_factory=lambda: np.zeros(0))
    x_min: np.ndarray = field(default_factory=lambda: np.zeros(0))
    a_min: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _local_amplitude(f: np.ndarray, i: int, kh: float) -> float:
    # three samples of m + A cos(theta): the second difference removes the local mean
    y_m, y0, y_p = f[i - 1], f[i], f[i + 1]
    c = (y_p + y_m - 2.0 * y0) / (2.0 * (math.cos(kh) - 1.0))
    s = (y_m - y_p) / (2.0 * math.sin(kh))
    return math.hypot(c, s)


def envelope_1d(f: np.ndarray, x: np.ndarray, kc: float, min_extrema: int = 3) -> Envelope:
    """Envelope of a modulated carrier ``m(x) + A(x) cos(kc x + phase)``.

    Local extrema are located on the grid; at each one the carrier amplitude
    is recovered from three samples (the second difference cancels a slowly
    varying mean). Maxima and minima are interpolated separately and the two
    curves averaged, which cancels the even-harmonic bias.
    """
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    h = float(x[1] - x[0])
    kh = kc * h
    if not (0 < kh < np.pi):
        raise AnalysisError("carrier is not resolved by the grid")
    d = np.diff(f)
    imax = [i for i in range(1, f.size - 1) if d[i - 1] > 0 and d[i] <= 0]
    imin = [i for i in range(1, f.size - 1) if d[i - 1] < 0 and d[i] >= 0]
    if len(imax) + len(imin) < min_extrema or not imax or not imin:
        raise AnalysisError("fewer than three extrema: no carrier to demodulate")
    amax = np.array([_local_amplitude(f, i, kh) for i in imax])
    amin = np.array([_local_amplitude(f, i, kh) for i in imin])
    xmax, xmin = x[imax], x[imin]
    upper = np.interp(x, xmax, amax)
    lower = np.interp(x, xmin, amin)
    return Envelope(x=x, A=0.5 * (upper + lower), kc=kc, x_max=xmax, a_max=amax, x_min=xmin, a_min=amin)


def envelope_projection(u: np.ndarray, x: np.ndarray, kc: float, window: float | None = None) -> np.ndarray:
    """Alternative envelope by local least squares against ``cos`` and ``sin`` of the carrier."""
    x = np.asarray(x, dtype=float)
    h = float(x[1] - x[0])
    if window is None:
        window = 2.0 * np.pi / kc
    half = max(2, int(round(0.5 * window / h)))
    out = np.zeros_like(u, dtype=float)
    for i in range(u.size):
        lo, hi = max(0, i - half), min(u.size, i + half + 1)
        xs = x[lo:hi]
        M = np.column_stack([np.ones_like(xs), np.cos(kc * xs), np.sin(kc * xs)])
        coef, *_ = np.linalg.lstsq(M, u[lo:hi], rcond=None)
        out[i] = math.hypot(coef[1], coef[2])
    return out


@dataclass
class FrontTrack:
    times: np.ndarray
    left: np.ndarray
    right: np.ndarray
    speed_left: float  # outward (towards smaller x) speed
    speed_right: float  # outward (towards larger x) speed
    level: float


def _crossings(x: np.ndarray, A: np.ndarray, level: float) -> np.ndarray:
    s = A - level
    idx = np.nonzero(np.sign(s[:-1]) * np.sign(s[1:]) < 0)[0]
    exact = x[s == 0]
    xs = [x[i] - s[i] * (x[i + 1] - x[i]) / (s[i + 1] - s[i]) for i in idx]
    return np.sort(np.concatenate([np.asarray(xs, dtype=float), exact]))


def front_position(envelopes, x: np.ndarray, times, level: float) -> FrontTrack:
    """Outermost crossings of ``level`` per snapshot and least-squares outward speeds."""
    times = np.asarray(times, dtype=float)
    left, right, ts = [], [], []
    for t, A in zip(times, envelopes):
        cr = _crossings(np.asarray(x, dtype=float), np.asarray(A, dtype=float), level)
        if cr.size == 0:
            continue
        left.append(cr[0])
        right.append(cr[-1])
        ts.append(t)
    if not ts:
        raise AnalysisError(f"envelope never crosses level {level}")
    ts = np.array(ts)
    left = np.array(left)
    right = np.array(right)
    if ts.size >= 2 and np.ptp(ts) > 0:
        vr = float(np.polyfit(ts, right, 1)[0])
        vl = float(-np.polyfit(ts, left, 1)[0])
    else:
        vr = vl = 0.0
    return FrontTrack(ts, left, right, vl, vr, level)


# --------------------------------------------------------------------------
# Bessel function J0


_SERIES_MAX = 12.0


def _j0_series(x: np.ndarray) -> np.ndarray:
    y = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = -term * y / (k * k)
        total = total + term
        if np.all(np.abs(term) < 1e-18):
            break
    return total


def _j0_quadrature(x: np.ndarray, nodes: int = 96) -> np.ndarray:
    # J0(x) = (1/pi) int_0^pi cos(x sin t) dt; trapezoid error ~ J_{2 nodes}(x)
    t = (np.arange(nodes) + 0.5) * np.pi / nodes
    return np.cos(np.outer(x, np.sin(t))).mean(axis=1)


def bessel_j0_asymptotic(x, terms: int = 2) -> np.ndarray:
    """Large-argument form ``sqrt(2/(pi x)) (P cos chi - Q sin chi)``, ``chi = x - pi/4``.

    ``terms`` counts correction terms beyond the leading cosine (0, 1 or 2).
    """
    x = np.asarray(x, dtype=float)
    chi = x - 0.25 * np.pi
    P = np.ones_like(x)
    Qc = np.zeros_like(x)
    if terms >= 1:
        Qc = Qc - 1.0 / (8.0 * x)
    if terms >= 2:
        P = P - 9.0 / (128.0 * x * x)
    return np.sqrt(2.0 / (np.pi * x)) * (P * np.cos(chi) - Qc * np.sin(chi))


def bessel_j0(x):
    """``J0(x)`` for ``x >= 0``: power series up to 12, trapezoid quadrature of the integral form beyond."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bessel_j0 expects x >= 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_MAX
    if np.any(small):
        out[small] = _j0_series(flat[small])
    if np.any(~small):
        xs = flat[~small]
        nodes = int(max(96, 0.5 * xs.max() + 60))
        out[~small] = _j0_quadrature(xs, nodes)
    out = out.reshape(np.shape(arr))
    return float(out) if np.ndim(arr) == 0 else out


# --------------------------------------------------------------------------
# target-pattern core


@dataclass
class CoreMatch:
    C: float
    residual: float
    eps: float | None
    kc: float
    r_inner: float
    offset: float
    center_amplitude: float
    outer_amplitude: float
    low_confidence: bool
    outer_fit: dict = field(default_factory=dict)


def core_match(r: np.ndarray, u: np.ndarray, kc: float, eps: float | None = None, rings: float = 2.0,
               outer_from: float | None = None, residual_threshold: float = 0.2) -> CoreMatch:
    """Fit ``u ~ offset + C J0(kc r)`` over the first ``rings`` wavelengths.

    The outer amplitude is the mean envelope over ``r >= outer_from`` (default:
    the outer half of the profile). When ``eps`` is given the outer envelope
    is also mapped to ``calA(R) = A R^(1/2)`` with ``R = eps r`` and
    ``A = envelope / eps``, and fitted to ``a + b R + c R log R`` near the core.
    """
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    lam = 2.0 * np.pi / kc
    r_in = rings * lam
    sel = r <= r_in
    if sel.sum() < 4:
        raise AnalysisError("inner region holds too few points")
    J = bessel_j0(kc * r[sel])
    M = np.column_stack([J, np.ones_like(J)])
    coef, *_ = np.linalg.lstsq(M, u[sel], rcond=None)
    C, off = float(coef[0]), float(coef[1])
    fit = M @ coef
    dev = u[sel] - u[sel].mean()
    resid = float(np.sqrt(np.mean((u[sel] - fit) ** 2)) / max(np.sqrt(np.mean(dev**2)), 1e-300))
    env = envelope_1d(u, r, kc)
    if outer_from is None:
        outer_from = 0.5 * r[-1]
    out_sel = (r >= outer_from) & (r <= r[-1] - lam)
    if not np.any(out_sel):
        out_sel = r >= outer_from
    outer = float(np.mean(env.A[out_sel]))
    center = float(abs(u[0] - off))
    outer_fit = {}
    if eps is not None:
        R = eps * r
        calA = env.A / eps * np.sqrt(R)
        band = (r > r_in) & (R <= 1.0)
        if band.sum() >= 3:
            Rb = R[band]
            Mb = np.column_stack([np.ones_like(Rb), Rb, Rb * np.log(Rb)])
            cf, *_ = np.linalg.lstsq(Mb, calA[band], rcond=None)
            outer_fit = {"a": float(cf[0]), "b": float(cf[1]), "c_RlogR": float(cf[2]),
                         "a_abs_a2": float(cf[0] * abs(cf[0]) ** 2)}
    return CoreMatch(C=abs(C), residual=resid, eps=eps, kc=kc, r_inner=r_in, offset=off,
                     center_amplitude=center, outer_amplitude=outer,
                     low_confidence=resid > residual_threshold, outer_fit=outer_fit)


def scaling_exponent(eps_values, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(eps)``."""
    le = np.log(np.asarray(eps_values, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(le, lv, 1)[0])
