"""Direct simulation of the rescaled system with homogeneous Neumann conditions.

Geometries: an interval, a rectangle, and the axisymmetric (radial) disk.
Grids are cell-centred so that the even extension of a field is exactly
the DCT-II basis ``cos(p pi x / L)``.

Two spatial schemes share one time integrator:

* ``spectral``: the Laplacians of ``u^(m+1)`` and ``v^(n+1)`` are applied in
  the cosine basis, nonlinear terms pointwise (pseudo-spectral);
* ``finite_difference``: a conservative three-point flux form with mirrored
  ghost cells.

The integrator is the Bogacki-Shampine 3(2) pair with first-same-as-last,
an embedded error estimate, and a step cap from the largest eigenvalue of
the discrete diffusion operator.
"""

from __future__ import annotations

import json
import math
import time as _time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.fft import dct, dctn, idctn

from .model import NondimParams, steady_state


class PositivityError(RuntimeError):
    """A step produced a nonpositive concentration (usually: step too large)."""


class SimulationDiverged(RuntimeError):
    pass


# --------------------------------------------------------------------------
# grids and fields


@dataclass(frozen=True)
class Grid:
    kind: str  # "line" | "rectangle" | "radial"
    lengths: tuple[float, ...]
    N: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("line", "rectangle", "radial"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        ndim = 2 if self.kind == "rectangle" else 1
        if len(self.lengths) != ndim or len(self.N) != ndim:
            raise ValueError(f"{self.kind} grid needs {ndim} length(s) and resolution(s)")
        for n in self.N:
            if n < 16 or n % 2:
                raise ValueError(f"resolution must be even and >= 16, got {n}")
        for L in self.lengths:
            if not L > 0:
                raise ValueError("lengths must be positive")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.N)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.N))

    @property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple((np.arange(n) + 0.5) * h for n, h in zip(self.N, self.spacing))

    def mesh(self) -> tuple[np.ndarray, ...]:
        if self.kind == "rectangle":
            return tuple(np.meshgrid(*self.coords, indexing="ij"))
        return self.coords

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights (midpoint rule; area element for radial grids)."""
        if self.kind == "radial":
            (r,) = self.coords
            return 2.0 * np.pi * r * self.spacing[0]
        return np.full(self.shape, float(np.prod(self.spacing)))

    def to_json(self) -> dict:
        return {"kind": self.kind, "lengths": list(self.lengths), "N": list(self.N)}

    @classmethod
    def from_json(cls, d: dict) -> "Grid":
        return cls(d["kind"], tuple(float(x) for x in d["lengths"]), tuple(int(x) for x in d["N"]))


def line_grid(L: float = 2 * np.pi, N: int = 256) -> Grid:
    return Grid("line", (float(L),), (int(N),))


def rectangle_grid(Lx: float, Ly: float, Nx: int = 128, Ny: int = 128) -> Grid:
    return Grid("rectangle", (float(Lx), float(Ly)), (int(Nx), int(Ny)))


def radial_grid(R: float, N: int = 512) -> Grid:
    return Grid("radial", (float(R),), (int(N),))


@dataclass
class Field:
    u: np.ndarray
    v: np.ndarray
    grid: Grid

    def copy(self) -> "Field":
        return Field(self.u.copy(), self.v.copy(), self.grid)

    def check_positive(self):
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise SimulationDiverged("non-finite values in field")
        if np.min(self.u) <= 0 or np.min(self.v) <= 0:
            raise PositivityError("field has nonpositive concentrations")


@dataclass
class SimConfig:
    t_end: float
    snap_every: float | None = None
    scheme: str = "spectral"  # "spectral" | "finite_difference"
    safety: float = 0.9
    rtol: float = 1e-6
    atol: float = 1e-9
    dt0: float | None = None
    dealias: bool = False
    steady_tol: float | None = None  # stop once max |du/dt| drops below this
    max_steps: int = 50_000_000
    seed: int | None = None
    ic: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0 < self.safety <= 1):
            raise ValueError("safety factor must lie in (0, 1]")
        if self.scheme not in ("spectral", "finite_difference", "fd"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "fd":
            self.scheme = "finite_difference"


@dataclass
class SnapshotSeries:
    grid: Grid
    params: NondimParams
    times: list[float] = field(default_factory=list)
    u: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)
    source_integral: list[float] = field(default_factory=list)  # cumulative int_0^t Gamma int (Q - u)
    metadata: dict = field(default_factory=dict)

    def append(self, t: float, u: np.ndarray, v: np.ndarray, src: float):
        if self.times and t <= self.times[-1]:
            raise ValueError("snapshot times must increase strictly")
        self.times.append(float(t))
        self.u.append(u.copy())
        self.v.append(v.copy())
        self.source_integral.append(float(src))

    def field(self, i: int = -1) -> Field:
        return Field(self.u[i], self.v[i], self.grid)

    def __len__(self):
        return len(self.times)


# --------------------------------------------------------------------------
# initial data


def make_initial(p: NondimParams, grid: Grid, kind: str = "steady", amp: float | None = None,
                 width: float | None = None, seed: int = 0, eps: float | None = None,
                 center: tuple[float, ...] | None = None) -> Field:
    """Steady state plus an optional perturbation of ``u`` and ``v``.

    kinds: ``steady``, ``random`` (uniform noise in ``[-amp, amp]`` per node),
    ``pulse`` (Gaussian bump of height ``amp`` and width ``width`` at
    ``center``), ``bump`` (radially symmetric Gaussian at the origin of a
    radial grid or the centre of a rectangle).
    """
    ss = steady_state(p)
    u = np.full(grid.shape, ss.u_bar)
    v = np.full(grid.shape, ss.v_bar)
    if kind == "steady":
        return Field(u, v, grid)
    if amp is None:
        amp = 1e-2 * (0.1 if eps is None else eps) * ss.u_bar
    if abs(amp) >= min(ss.u_bar, ss.v_bar):
        raise PositivityError(f"perturbation amplitude {amp} would break positivity")
    if kind in ("random", "random_perturbation"):
        rng = np.random.default_rng(seed)
        u = u + amp * rng.uniform(-1.0, 1.0, grid.shape)
        v = v + amp * rng.uniform(-1.0, 1.0, grid.shape)
    elif kind in ("pulse", "center_pulse", "bump", "radial_bump"):
        if width is None:
            width = 0.05 * max(grid.lengths)
        mesh = grid.mesh()
        if grid.kind == "radial":
            r2 = mesh[0] ** 2
        else:
            if center is None:
                center = tuple(0.5 * L for L in grid.lengths)
            r2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
        bump = amp * np.exp(-r2 / width**2)
        u = u + bump
        v = v + bump
    else:
        raise ValueError(f"unknown initial condition {kind!r}")
    f = Field(u, v, grid)
    f.check_positive()
    return f


# --------------------------------------------------------------------------
# spatial operators


class _Operators:
    """Laplacian (acting on the trailing spatial axes) and the diffusion eigenvalue bound.

    Small grids apply the Laplacian as one dense matrix per axis (for the
    spectral scheme ``C^T diag(-k^2) C``, equal to the transform route up to
    rounding), which avoids per-call overhead.
    """

    DENSE_MAX = 192

    def __init__(self, grid: Grid, scheme: str, dealias: bool = False):
        self.grid = grid
        self.scheme = scheme
        self.mask = None
        self.dense = None
        self.nd = len(grid.N)
        if grid.kind == "radial" and scheme == "spectral":
            scheme = self.scheme = "finite_difference"
        h = grid.spacing
        if scheme == "spectral":
            ks = [np.arange(n) * np.pi / L for n, L in zip(grid.N, grid.lengths)]
            if grid.kind == "line":
                self.k2 = ks[0] ** 2
            else:
                self.k2 = ks[0][:, None] ** 2 + ks[1][None, :] ** 2
            self.kappa2 = sum(float(k[-1]) ** 2 for k in ks)
            if dealias:
                masks = [np.arange(n) < (2 * n) // 3 for n in grid.N]
                self.mask = masks[0] if grid.kind == "line" else (masks[0][:, None] & masks[1][None, :])
            elif max(grid.N) <= self.DENSE_MAX:
                self.dense = []
                for n, k in zip(grid.N, ks):
                    C = dct(np.eye(n), type=2, norm="ortho", axis=0)
                    self.dense.append(C.T @ (-(k**2)[:, None] * C))
        else:
            self.kappa2 = sum(4.0 / hh**2 for hh in h)
            if grid.kind == "radial":
                (r,) = grid.coords
                hr = h[0]
                rf = np.arange(grid.N[0] + 1) * hr  # faces
                rf[-1] = 0.0  # no flux at the outer wall
                self._rad_plus = rf[1:] / (r * hr * hr)
                self._rad_minus = rf[:-1] / (r * hr * hr)
                if grid.N[0] <= self.DENSE_MAX:
                    M = np.diag(-(self._rad_plus + self._rad_minus))
                    M += np.diag(self._rad_plus[:-1], 1) + np.diag(self._rad_minus[1:], -1)
                    self.dense = [M.T]
            elif max(grid.N) <= self.DENSE_MAX:
                self.dense = []
                for n, hh in zip(grid.N, h):
                    M = (np.diag(np.full(n - 1, 1.0), 1) + np.diag(np.full(n - 1, 1.0), -1)
                         - 2.0 * np.eye(n))
                    M[0, 0] = M[-1, -1] = -1.0  # mirrored ghost cells
                    self.dense.append(M.T / hh**2)

    def _axes(self):
        return tuple(range(-self.nd, 0))

    def fwd(self, f):
        return dctn(f, type=2, norm="ortho", axes=self._axes())

    def inv(self, c):
        return idctn(c, type=2, norm="ortho", axes=self._axes())

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        # dense[i] holds the transpose of the axis operator
        if self.dense is not None:
            if self.nd == 1:
                return f @ self.dense[0]
            return np.matmul(self.dense[0].T, f) + f @ self.dense[1]
        if self.scheme == "spectral":
            c = self.fwd(f) * (-self.k2)
            if self.mask is not None:
                c = c * self.mask
            return self.inv(c)
        if self.grid.kind == "radial":
            d = np.diff(f, axis=-1)
            fp = np.concatenate([d, np.zeros(f.shape[:-1] + (1,))], axis=-1)
            fm = np.concatenate([np.zeros(f.shape[:-1] + (1,)), d], axis=-1)
            return self._rad_plus * fp - self._rad_minus * fm
        out = np.zeros_like(f)
        for ax, hh in zip(self._axes(), self.grid.spacing):
            g = np.moveaxis(f, ax, 0)
            padded = np.concatenate([g[:1], g, g[-1:]], axis=0)
            out += np.moveaxis((padded[2:] - 2.0 * g + padded[:-2]) / hh**2, 0, ax)
        return out

    def smooth(self, f):
        if self.scheme == "spectral" and self.mask is not None:
            return self.inv(self.fwd(f) * self.mask)
        return f


def make_rhs(p: NondimParams, ops: _Operators):
    """Return ``rhs(Y) -> dY/dt`` for the stacked state ``Y = (u, v)``."""
    Q, b, G = p.Q, p.b, p.Gamma
    ie2 = 1.0 / p.eta**2
    expo = np.array([p.m + 1.0, p.n + 1.0]).reshape((2,) + (1,) * ops.nd)
    integer_powers = p.m == 1 and p.n == 1

    def rhs(Y):
        u, v = Y[0], Y[1]
        u2v = u * u * v
        P = Y * Y if integer_powers else Y**expo
        lap = ops.laplacian(P)
        out = np.empty_like(Y)
        out[0] = lap[0] + G * (Q - (b + 1.0) * u + u2v)
        out[1] = ie2 * (lap[1] + G * (b * u - u2v))
        if ops.mask is not None:
            out = ops.smooth(out)
        return out

    return rhs


def diffusion_dt_cap(p: NondimParams, ops: _Operators, Y, safety: float) -> float:
    """``safety * 2 / lambda_max`` with ``lambda_max`` the diffusion operator's spectral radius.

    For the finite-difference scheme this is ``safety * h^2 / (2 d D_max)``.
    """
    dmax = max((p.m + 1.0) * float(Y[0].max()) ** p.m, (p.n + 1.0) / p.eta**2 * float(Y[1].max()) ** p.n)
    return safety * 2.0 / (dmax * ops.kappa2)


# --------------------------------------------------------------------------
# time integration


_BS_A = (0.5, 0.75)
_BS_B = (2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0)
_BS_E = (-5.0 / 72.0, 1.0 / 12.0, 1.0 / 9.0, -1.0 / 8.0)


def simulate(p: NondimParams, grid: Grid, config: SimConfig, init: Field | None = None,
             progress=None) -> SnapshotSeries:
    """Advance ``init`` (default: per ``config.ic``) to ``config.t_end``.

    Snapshots are stored at multiples of ``config.snap_every`` plus the
    initial and final states. Raises :class:`PositivityError` if an accepted
    step leaves the positive cone and :class:`SimulationDiverged` on NaN.
    """
    if init is None:
        ic = dict(config.ic) if config.ic else {"kind": "steady"}
        kind = ic.pop("kind", "steady")
        init = make_initial(p, grid, kind, seed=config.seed if config.seed is not None else 0, **ic)
    init.check_positive()
    ops = _Operators(grid, config.scheme, config.dealias)
    rhs = make_rhs(p, ops)
    w = grid.weights
    G, Q = p.Gamma, p.Q
    wflat = np.ascontiguousarray(w, dtype=float).ravel()
    wsum = float(wflat.sum())

    def source(u):
        return G * (Q * wsum - float(wflat @ u.ravel()))

    Y = np.stack([init.u, init.v]).astype(float)
    series = SnapshotSeries(grid=grid, params=p, metadata={
        "scheme": ops.scheme, "seed": config.seed, "safety": config.safety, "rtol": config.rtol,
        "atol": config.atol, "dealias": config.dealias, "ic": config.ic, "integrator": "bogacki-shampine-3(2)"})
    t = 0.0
    S = 0.0
    series.append(t, Y[0], Y[1], S)
    snap_dt = config.snap_every
    next_snap = snap_dt if snap_dt else math.inf
    t_end = float(config.t_end)
    atol, rtol = config.atol, config.rtol
    a1, a2 = _BS_A
    b1, b2, b3 = _BS_B
    e1, e2, e3, e4 = _BS_E
    k1 = rhs(Y)
    dt = config.dt0 or diffusion_dt_cap(p, ops, Y, config.safety)
    steps = rejects = 0
    wall0 = _time.time()
    steady_reached = False
    while t < t_end - 1e-14 * max(1.0, t_end):
        cap = diffusion_dt_cap(p, ops, Y, config.safety)
        h = min(dt, cap, t_end - t, next_snap - t if next_snap > t else math.inf)
        Y2 = Y + (h * a1) * k1
        k2 = rhs(Y2)
        Y3 = Y + (h * a2) * k2
        k3 = rhs(Y3)
        Yn = Y + h * (b1 * k1 + b2 * k2 + b3 * k3)
        k4 = rhs(Yn)
        E = h * (e1 * k1 + e2 * k2 + e3 * k3 + e4 * k4)
        err = float(np.max(np.abs(E) / (atol + rtol * np.abs(Yn))))
        if not np.isfinite(err):
            raise SimulationDiverged(f"non-finite state at t={t:.6g}")
        if err <= 1.0:
            if float(np.min(Yn)) <= 0:
                raise PositivityError(f"nonpositive concentration at t={t + h:.6g} (dt={h:.3e})")
            # exact discrete balance: the RK weights applied to the stage sources
            S += h * (b1 * source(Y[0]) + b2 * source(Y2[0]) + b3 * source(Y3[0]))
            t += h
            Y = Yn
            k1 = k4
            steps += 1
            if t >= next_snap - 1e-12 * max(1.0, t):
                series.append(t, Y[0], Y[1], S)
                next_snap += snap_dt
                if progress is not None:
                    progress(t, Y[0], Y[1])
            if config.steady_tol is not None and steps % 50 == 0:
                if float(np.max(np.abs(k1))) < config.steady_tol:
                    steady_reached = True
                    break
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** (-1.0 / 3.0)))
            dt = h * fac
        else:
            rejects += 1
            dt = h * max(0.2, 0.9 * err ** (-1.0 / 3.0))
        if steps + rejects > config.max_steps:
            raise SimulationDiverged(f"step budget exhausted at t={t:.6g}")
    if series.times[-1] < t:
        series.append(t, Y[0], Y[1], S)
    series.metadata.update({"steps": steps, "rejected": rejects, "wall_time": _time.time() - wall0,
                            "t_final": t, "steady_reached": steady_reached,
                            "final_rate": float(np.max(np.abs(k1)))})
    return series


def simulate_radial(p: NondimParams, grid: Grid, config: SimConfig, init: Field | None = None,
                    progress=None) -> SnapshotSeries:
    """Axisymmetric run: ``(1/r) d/dr (r d/dr .)`` in finite-volume form, no flux at ``r=0`` and ``R``."""
    if grid.kind != "radial":
        raise ValueError("simulate_radial needs a radial grid")
    if config.scheme == "spectral":
        config = SimConfig(**{**asdict(config), "scheme": "finite_difference"})
    return simulate(p, grid, config, init, progress)


def run_to_steady(p: NondimParams, grid: Grid, init: Field, t_max: float, steady_tol: float = 1e-9,
                  scheme: str = "spectral", **kw) -> SnapshotSeries:
    cfg = SimConfig(t_end=t_max, snap_every=kw.pop("snap_every", None), scheme=scheme,
                    steady_tol=steady_tol, **kw)
    return simulate(p, grid, cfg, init)


# --------------------------------------------------------------------------
# diagnostics


def integral(grid: Grid, f: np.ndarray) -> float:
    return float(np.sum(grid.weights * f))


def mass_balance(series: SnapshotSeries) -> np.ndarray:
    """Residual of ``d/dt int (u + eta^2 v) = Gamma int (Q - u)`` per snapshot interval.

    Uses the source integral accumulated by the integrator when available,
    otherwise the trapezoidal rule between snapshots.
    """
    p = series.params
    e2 = p.eta**2
    M = np.array([integral(series.grid, u + e2 * v) for u, v in zip(series.u, series.v)])
    t = np.asarray(series.times)
    if len(t) < 2:
        return np.zeros(0)
    dt = np.diff(t)
    if series.source_integral and len(series.source_integral) == len(t):
        dS = np.diff(np.asarray(series.source_integral))
    else:
        src = np.array([p.Gamma * integral(series.grid, p.Q - u) for u in series.u])
        dS = 0.5 * (src[1:] + src[:-1]) * dt
    return (np.diff(M) - dS) / dt


# --------------------------------------------------------------------------
# persistence


def save_series(series: SnapshotSeries, outdir: str | Path) -> Path:
    """Write one JSON header plus a raw little-endian float64 blob (u then v) per snapshot."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (t, u, v) in enumerate(zip(series.times, series.u, series.v)):
        stem = f"snap_{i:05d}"
        header = {"index": i, "time": t, "params": series.params.to_dict(), "grid": series.grid.to_json(),
                  "seed": series.metadata.get("seed"), "scheme": series.metadata.get("scheme"),
                  "shape": list(u.shape), "dtype": "<f8", "order": "C", "arrays": ["u", "v"],
                  "source_integral": series.source_integral[i] if series.source_integral else None}
        (out / f"{stem}.json").write_text(json.dumps(header, indent=1))
        blob = np.concatenate([np.ascontiguousarray(u, dtype="<f8").ravel(),
                               np.ascontiguousarray(v, dtype="<f8").ravel()])
        (out / f"{stem}.bin").write_bytes(blob.tobytes())
        entries.append({"index": i, "time": t, "header": f"{stem}.json", "data": f"{stem}.bin"})
    index = {"grid": series.grid.to_json(), "params": series.params.to_dict(),
             "metadata": to_jsonable(series.metadata), "snapshots": entries}
    (out / "index.json").write_text(json.dumps(index, indent=1))
    return out


def load_series(outdir: str | Path) -> SnapshotSeries:
    out = Path(outdir)
    index = json.loads((out / "index.json").read_text())
    grid = Grid.from_json(index["grid"])
    pd = index["params"]
    p = NondimParams.from_squares(pd["Q2"], pd["eta2"], pd["b"], pd["Gamma"], pd["m"], pd["n"])
    s = SnapshotSeries(grid=grid, params=p, metadata=index.get("metadata", {}))
    for e in index["snapshots"]:
        header = json.loads((out / e["header"]).read_text())
        data = np.frombuffer((out / e["data"]).read_bytes(), dtype="<f8")
        n = int(np.prod(header["shape"]))
        s.times.append(float(header["time"]))
        s.u.append(data[:n].reshape(header["shape"]).copy())
        s.v.append(data[n:].reshape(header["shape"]).copy())
        if header.get("source_integral") is not None:
            s.source_integral.append(float(header["source_integral"]))
    if len(s.source_integral) != len(s.times):
        s.source_integral = []
    return s


def export_profile_csv(series: SnapshotSeries, path: str | Path, index: int = -1, axis_cut: int | None = None):
    """CSV of a 1D profile, a radial cross-section, or a mid-line cut of a 2D field."""
    g = series.grid
    u, v = series.u[index], series.v[index]
    if g.kind == "rectangle":
        j = g.N[1] // 2 if axis_cut is None else axis_cut
        x = g.coords[0]
        u, v = u[:, j], v[:, j]
    else:
        x = g.coords[0]
    header = "r,u,v" if g.kind == "radial" else "x,u,v"
    np.savetxt(path, np.column_stack([x, u, v]), delimiter=",", header=header, comments="")


def to_jsonable(obj):
    """Convert numpy scalars and arrays (also nested in containers) to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj
