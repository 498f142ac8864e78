"""Command-line front end: ``brusselator <subcommand> ...``.

Exit codes: 0 success, 1 domain error (invalid parameters, no Turing
branch, positivity loss, ...), 2 usage error (bad flags, unreadable
input). Set ``BRUSSELATOR_THREADS`` to cap the threads of the numerical
libraries (default 1, which keeps runs bit-reproducible).
"""

from __future__ import annotations

import os

_THREADS = os.environ.get("BRUSSELATOR_THREADS", "1")
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, _THREADS)

import argparse  # noqa: E402
import csv  # noqa: E402
import json  # noqa: E402
import math  # noqa: E402
import sys  # noqa: E402
import time  # noqa: E402
from importlib import resources  # noqa: E402
from pathlib import Path  # noqa: E402

import numpy as np  # noqa: E402

from . import __version__  # noqa: E402
from . import amplitude as amp  # noqa: E402
from . import analysis, linstab, modes, pde, validation, wnl  # noqa: E402
from .model import ParameterError, params_from_config  # noqa: E402


class UsageError(Exception):
    pass


DOMAIN_ERRORS = (ParameterError, linstab.NoTuringBranch, modes.NoAdmissibleMode, pde.PositivityError,
                 pde.SimulationDiverged, analysis.AnalysisError, amp.DegenerateCoefficients, amp.NoSaddleNode,
                 wnl.SolvabilityError, wnl.KernelError, ValueError, ArithmeticError)


# --------------------------------------------------------------------------
# config and manifest


def preset_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("brusselator.presets").iterdir()
                  if p.name.endswith(".json"))


def load_config(ref: str) -> dict:
    """Read a JSON config from a path, or a bundled preset by name (``fig3_1`` or ``fig3_1.json``)."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    else:
        name = path.name[:-5] if path.name.endswith(".json") else path.name
        if name not in preset_names():
            raise UsageError(f"no config file or preset named {ref!r}; presets: {', '.join(preset_names())}")
        text = resources.files("brusselator.presets").joinpath(f"{name}.json").read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {ref}: {exc}") from None


def params_section(cfg: dict) -> dict:
    return cfg.get("params", cfg)


def epsilon_of(cfg: dict):
    e = params_section(cfg).get("epsilon")
    return None if e is None else float(e)


def write_manifest(outdir: Path, command: str, argv: list[str], config: dict, outputs: list[str],
                   wall: float, seed=None):
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {"command": command, "argv": argv, "config": config, "seed": seed,
                "code_version": __version__, "outputs": outputs, "wall_time": round(wall, 3)}
    (outdir / "manifest.json").write_text(json.dumps(pde.to_jsonable(manifest), indent=2))


def write_csv(path: Path, rows: list[dict], columns: list[str] | None = None):
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = columns or (list(rows[0]) if rows else [])
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)


def _grid_range(spec) -> np.ndarray:
    lo, hi, n = spec
    return np.linspace(float(lo), float(hi), int(n))


def parse_domain(text: str | None) -> list[modes.DomainLength]:
    if not text:
        return []
    try:
        return [modes.DomainLength.parse(t) for t in str(text).split(",")]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


class _Out:
    def __init__(self, quiet: bool = False, as_json: bool = False):
        self.quiet = quiet
        self.json = as_json

    def info(self, msg: str):
        if not self.quiet and not self.json:
            print(msg)

    def data(self, obj):
        if self.json:
            print(json.dumps(pde.to_jsonable(obj)))


# --------------------------------------------------------------------------
# subcommands


def cmd_analyze(args, out: _Out) -> tuple[dict, list[str]]:
    cfg = load_config(args.params)
    ps = params_section(cfg)
    p = params_from_config(ps)
    sweep = dict(cfg.get("sweep", {}))
    kind = args.sweep or sweep.get("kind", "eta2,Q2")
    panels = cfg.get("panels") or [{"m": p.m, "n": p.n}]
    rows = []
    if kind == "eta2,Q2":
        eta2 = _grid_range(sweep.get("eta2", [0.05, 2.0, 40]))
        Q2 = _grid_range(sweep.get("Q2", [0.05, 8.0, 40]))
        for pan in panels:
            for r in linstab.sweep_eta_Q(pan["m"], pan["n"], p.b, p.Gamma, eta2, Q2,
                                         criticality=bool(sweep.get("criticality", False))):
                rows.append({**r, "m": pan["m"], "n": pan["n"]})
        cols = ["eta2", "Q2", "b", "m", "n", "b_hopf", "b_turing", "kc2", "region"]
        if sweep.get("criticality"):
            cols.append("criticality")
    elif kind == "Q2,b":
        Q2 = _grid_range(sweep.get("Q2", [0.05, 8.0, 40]))
        b = _grid_range(sweep.get("b", [1.0, 15.0, 57]))
        for pan in panels:
            for e2 in cfg.get("eta2_values", [p.eta2]):
                for r in linstab.sweep_Q_b(pan["m"], pan["n"], e2, p.Gamma, Q2, b):
                    rows.append({**r, "m": pan["m"], "n": pan["n"]})
        cols = ["Q2", "b", "eta2", "m", "n", "b_hopf", "b_turing", "kc2", "region"]
    else:
        raise UsageError(f"unknown sweep {kind!r}; use eta2,Q2 or Q2,b")
    outputs = []
    if args.out:
        write_csv(Path(args.out), rows, cols)
        outputs.append(args.out)
    th = linstab.turing_threshold(p)
    summary = {"b_hopf": th.b_hopf, "b_turing": th.b_turing, "kc2": th.kc2, "rows": len(rows),
               "regions": {k: sum(r["region"] == k for r in rows) for k in ("stable", "H", "T", "T-H")}}
    out.info(f"b_hopf={th.b_hopf:.6g} b_turing={th.b_turing:.6g} kc2={th.kc2:.6g}; {len(rows)} grid points "
             + " ".join(f"{k}:{v}" for k, v in summary["regions"].items()))
    out.data(summary)
    return cfg, outputs


def build_model(cfg: dict, kind: str, domain: list[modes.DomainLength]) -> wnl.AmplitudeModel:
    p = params_from_config(params_section(cfg))
    eps = epsilon_of(cfg)
    ms = None
    if domain:
        ms = modes.admissible_modes(p, domain[0], domain[1] if len(domain) > 1 else None)
    if kind == "sl":
        return wnl.stuart_landau_coeffs(p, ms, eps=eps)
    if kind == "gl":
        return wnl.ginzburg_landau_coeffs(p, eps=eps)
    if kind == "quintic":
        return wnl.quintic_coeffs(p, ms, eps=eps)
    if ms is None:
        raise UsageError(f"--kind {kind} needs a 2D --domain Lx,Ly")
    if kind == "coupled":
        return wnl.coupled_landau_coeffs(p, ms, eps=eps)
    return wnl.resonant_coeffs(p, ms, eps=eps)


def cmd_coeffs(args, out: _Out):
    cfg = load_config(args.params)
    section = cfg.get("coeffs", {})
    kind = args.kind or section.get("kind", "sl")
    domain = parse_domain(args.domain if args.domain is not None else section.get("domain"))
    model = build_model(cfg, kind, domain)
    data = model.to_json()
    outputs = []
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(pde.to_jsonable(data), indent=2))
        outputs.append(args.out)
    out.info(f"{model.kind}: " + ", ".join(f"{k}={v:.6g}" for k, v in model.coefficients.items())
             + f" (b_c={model.b_c:.6g}, k2={model.k2:.6g})")
    out.data(data)
    return cfg, outputs


def _equilibria(model):
    if model.kind in ("cubic_SL", "GL"):
        return [amp.sl_equilibrium(model)]
    if model.kind == "coupled":
        return amp.coupled_equilibria(model)
    if model.kind == "resonant":
        return amp.hexagon_equilibria(model)
    # quintic: physical amplitudes at mu = eps^2
    eqs = amp.quintic_branches(model.raw, model.eps**2 if model.eps else 0.0)
    return [amp.Equilibrium(np.array([a]), "stable" if st else "unstable", np.zeros(0), "physical")
            for a, st in eqs]


def cmd_amplitude(args, out: _Out):
    try:
        data = json.loads(Path(args.model).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read model {args.model}: {exc}") from None
    model = wnl.AmplitudeModel.from_json(data)
    rows, cols = [], []
    summary = {"task": args.task}
    if args.task == "integrate":
        dim = {"coupled": 2, "resonant": 2}.get(model.kind, 1)
        init = [float(x) for x in args.init.split(",")] if args.init else [1e-2] * dim
        if model.kind == "GL":
            X = (np.arange(args.nx) + 0.5) * args.length / args.nx
            A0 = init[0] * np.exp(-((X - args.length / 2) ** 2))
            tr = amp.integrate_amplitude(model, A0, args.tend, n_out=21, X=X)
            for t, A in zip(tr.T, tr.A):
                rows += [{"T": t, "X": x, "A": a} for x, a in zip(X, A)]
            cols = ["T", "X", "A"]
        else:
            if len(init) != dim:
                raise UsageError(f"--init needs {dim} value(s)")
            tr = amp.integrate_amplitude(model, init, args.tend)
            cols = ["T"] + [f"A{i + 1}" for i in range(dim)]
            rows = [{"T": t, **{f"A{i + 1}": a for i, a in enumerate(np.atleast_1d(A))}} for t, A in zip(tr.T, tr.A)]
            out.info(f"integrated to T={tr.T[-1]:.4g}, final {np.atleast_1d(tr.final)}"
                     + (" (diverged)" if tr.diverged else ""))
    elif args.task == "equilibria":
        eqs = _equilibria(model)
        cols = ["label", "values", "stability", "eigenvalues", "residual"]
        rows = [{"label": e.label, "values": " ".join(f"{v:.10g}" for v in np.atleast_1d(e.values)),
                 "stability": e.stability, "eigenvalues": " ".join(f"{complex(z):.6g}" for z in e.eigenvalues),
                 "residual": e.residual} for e in eqs]
        for r in rows:
            out.info(f"{r['label'] or '-':>8} [{r['values']}] {r['stability']}")
    elif args.task in ("diagram", "hysteresis"):
        if model.kind != "quintic_SL":
            raise ValueError("bifurcation diagram and hysteresis need a quintic model (coeffs --kind quintic)")
        d = amp.quintic_diagram(model)
        if args.task == "diagram":
            cols = ["branch", "b", "amplitude", "stable"]
            for name, br in d.branches.items():
                rows += [{"branch": name, "b": b, "amplitude": a, "stable": bool(s)}
                         for b, a, s in zip(br.b, br.amplitude, br.stable)]
            out.info(f"b_c={d.b_c:.6g} b_s={d.b_s if d.b_s is None else round(d.b_s, 6)}")
            summary.update(b_c=d.b_c, b_s=d.b_s)
        else:
            if args.b_path:
                path = [float(x) for x in args.b_path.split(",")]
            else:
                if d.b_s is None:
                    raise ValueError("no saddle node: supply --b-path explicitly")
                path = [d.b_c * 1.002, 0.5 * (d.b_s + d.b_c), d.b_s * 0.999, d.b_c * 1.002]
            h = amp.hysteresis_sweep(model, path)
            cols = ["t", "b", "a"]
            rows = [{"t": t, "b": b, "a": a} for t, b, a in zip(h.t, h.b_t, h.a_t)]
            for b, a, ph in zip(h.b_path, h.final_amplitude, h.phases):
                out.info(f"b={b:.6g} ({ph}) -> a={a:.4g}")
            summary.update(b_path=path, final_amplitude=h.final_amplitude, phases=h.phases)
    outputs = []
    if args.out:
        write_csv(Path(args.out), rows, cols)
        outputs.append(args.out)
    out.data({**summary, "rows": rows if len(rows) <= 64 else len(rows)})
    return {"model": data}, outputs


def _sim_setting(args, section: dict, name: str, default=None):
    val = getattr(args, name, None)
    return section.get(name, default) if val is None else val


def cmd_simulate(args, out: _Out):
    cfg = load_config(args.params)
    sec = cfg.get("simulate", {})
    p = params_from_config(params_section(cfg))
    eps = epsilon_of(cfg)
    geometry = _sim_setting(args, sec, "geometry", "1d")
    dom = parse_domain(_sim_setting(args, sec, "domain", "2"))
    grid_n = args.grid if args.grid is not None else sec.get("grid")
    if geometry == "1d":
        grid = pde.line_grid(dom[0].value, int(grid_n or 256))
    elif geometry == "2d":
        if len(dom) != 2:
            raise UsageError("2d geometry needs --domain Lx,Ly")
        n = grid_n or [128, 128]
        n = [int(x) for x in (str(n).split(",") if isinstance(n, str) else np.atleast_1d(n))]
        grid = pde.rectangle_grid(dom[0].value, dom[1].value, n[0], n[-1])
    elif geometry == "radial":
        grid = pde.radial_grid(dom[0].value, int(grid_n or 512))
    else:
        raise UsageError(f"unknown geometry {geometry!r}")
    ic = _sim_setting(args, sec, "ic", "random")
    seed = int(_sim_setting(args, sec, "seed", 0))
    tend = float(_sim_setting(args, sec, "tend", 10.0))
    snap = _sim_setting(args, sec, "snap_every", None)
    scheme = _sim_setting(args, sec, "scheme", "spectral")
    if ic == "wavepacket":
        if eps is None:
            raise UsageError("the wavepacket seed needs params.epsilon")
        init = validation.front_seed(p, grid, eps, width=sec.get("width") or 1.0)
    else:
        init = pde.make_initial(p, grid, ic, amp=sec.get("amp"), width=sec.get("width"), seed=seed, eps=eps)
    config = pde.SimConfig(t_end=tend, snap_every=None if snap is None else float(snap), scheme=scheme,
                           seed=seed, steady_tol=sec.get("steady_tol"),
                           ic={"kind": ic, "seed": seed, "amp": sec.get("amp"), "width": sec.get("width")})

    def progress(t, u, v):
        out.info(f"t={t:.4g} max|u-Q|={np.max(np.abs(u - p.Q)):.4g}")

    series = pde.simulate(p, grid, config, init, progress=None if args.quiet else progress)
    series.metadata.update({"seed": seed, "scheme": config.scheme, "ic": config.ic, "geometry": geometry})
    outputs = []
    if args.out:
        d = pde.save_series(series, args.out)
        outputs.append(str(d / "index.json"))
        if grid.kind in ("line", "radial"):
            pde.export_profile_csv(series, d / "profile.csv")
            outputs.append(str(d / "profile.csv"))
    md = series.metadata
    out.info(f"done: t={md['t_final']:.4g}, {md['steps']} steps, steady={md['steady_reached']}, "
             f"{len(series)} snapshots")
    out.data({"t_final": md["t_final"], "steps": md["steps"], "snapshots": len(series),
              "steady_reached": md["steady_reached"]})
    resolved = {**cfg, "simulate": {"geometry": geometry, "domain": [x.text for x in dom], "grid": list(grid.N),
                                    "ic": ic, "seed": seed, "tend": tend, "snap_every": snap, "scheme": scheme}}
    return resolved, outputs


def _load(dirname: str) -> pde.SnapshotSeries:
    try:
        return pde.load_series(dirname)
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read snapshot directory {dirname}: {exc}") from None


def cmd_spectrum(args, out: _Out):
    s = _load(args.series)
    sp = analysis.cosine_spectrum(s.u[args.index], s.grid)
    rows = []
    amps = sp.amplitudes
    for idx in np.ndindex(amps.shape):
        if any(idx) and abs(amps[idx]) > 0:
            rows.append({"mode": " ".join(map(str, idx)), "amplitude": amps[idx], "relative": sp.relative(idx)})
    rows.sort(key=lambda r: -abs(r["amplitude"]))
    if args.out:
        write_csv(Path(args.out), rows, ["mode", "amplitude", "relative"])
    out.info("dominant: " + ", ".join(f"{m}:{sp.relative(m):.3f}" for m in sp.dominant[:8]))
    out.data({"dominant": [list(np.atleast_1d(m)) for m in sp.dominant], "mean": sp.mean})
    return {"series": args.series, "index": args.index}, [args.out] if args.out else []


def cmd_envelope(args, out: _Out):
    s = _load(args.series)
    if s.grid.kind == "rectangle":
        raise ValueError("envelopes are defined for 1D and radial series")
    p = s.params
    kc = math.sqrt(args.kc2 if args.kc2 else linstab.turing_threshold(p).kc2)
    x = s.grid.coords[0]
    envs, rows = [], []
    for t, u in zip(s.times, s.u):
        try:
            e = analysis.envelope_1d(u - p.Q, x, kc).A
        except analysis.AnalysisError:
            e = np.zeros_like(x)
        envs.append(e)
        rows += [{"t": t, "x": xx, "envelope": a} for xx, a in zip(x, e)]
    level = args.level if args.level else 0.5 * max(float(np.max(e)) for e in envs)
    summary = {"level": level}
    try:
        ft = analysis.front_position(envs, x, s.times, level)
        summary.update({"speed_left": ft.speed_left, "speed_right": ft.speed_right})
        out.info(f"front speeds at level {level:.4g}: left {ft.speed_left:.4g}, right {ft.speed_right:.4g}")
    except analysis.AnalysisError as exc:
        out.info(f"no front: {exc}")
    if args.out:
        write_csv(Path(args.out), rows, ["t", "x", "envelope"])
    out.data(summary)
    return {"series": args.series}, [args.out] if args.out else []


def cmd_corematch(args, out: _Out):
    rows = []
    for d in args.series:
        s = _load(d)
        if s.grid.kind != "radial":
            raise ValueError(f"{d} is not a radial series")
        p = s.params
        th = linstab.turing_threshold(p)
        mu = (p.b - th.b_turing) / th.b_turing
        eps = math.sqrt(mu) if mu > 0 else None
        cm = analysis.core_match(s.grid.coords[0], s.u[-1], math.sqrt(th.kc2), eps=eps)
        rows.append({"series": d, "eps": eps, "C": cm.C, "center": cm.center_amplitude,
                     "outer": cm.outer_amplitude, "residual": cm.residual, "low_confidence": cm.low_confidence})
        out.info(f"{d}: eps={eps} C={cm.C:.4g} center={cm.center_amplitude:.4g} outer={cm.outer_amplitude:.4g}"
                 + (" (low confidence)" if cm.low_confidence else ""))
    summary = {"fits": rows}
    if len(rows) >= 2 and all(r["eps"] for r in rows):
        summary["exponent"] = analysis.scaling_exponent([r["eps"] for r in rows], [r["C"] for r in rows])
        out.info(f"exponent of C(eps): {summary['exponent']:.3f}")
    if args.out:
        write_csv(Path(args.out), rows, list(rows[0].keys()))
    out.data(summary)
    return {"series": args.series}, [args.out] if args.out else []


def cmd_validate(args, out: _Out):
    def report(res):
        if out.json:
            print(json.dumps(res.to_json()), flush=True)
        elif not out.quiet:
            print(res.line(), flush=True)

    if args.criteria:
        ids = [int(x) for x in args.criteria.split(",")]
        bad = [i for i in ids if i not in validation.CRITERIA]
        if bad:
            raise UsageError(f"unknown criteria {bad}")
        results = []
        for i in ids:
            results.append(validation.run_criterion(i))
            report(results[-1])
    else:
        results = validation.run_suite(args.suite, on_result=report)
    passed = sum(r.passed for r in results)
    out.info(f"{passed}/{len(results)} criteria passed")
    outputs = []
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps([r.to_json() for r in results], indent=2))
        outputs.append(args.out)
    args._failed = passed < len(results)
    return {"suite": args.suite, "criteria": args.criteria}, outputs


# --------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brusselator", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress progress output")
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    a = sub.add_parser("analyze", parents=[common], help="stability regions over a parameter sweep")
    a.add_argument("--params", required=True, help="JSON config file or preset name")
    a.add_argument("--sweep", choices=["eta2,Q2", "Q2,b"])
    a.add_argument("--out", help="CSV output")

    c = sub.add_parser("coeffs", parents=[common], help="amplitude-equation coefficients")
    c.add_argument("--params", required=True)
    c.add_argument("--kind", choices=["sl", "gl", "quintic", "coupled", "resonant"])
    c.add_argument("--domain", help="Lx[,Ly] in units of pi, e.g. 2 or 2,2*sqrt(3)")
    c.add_argument("--out", help="JSON output")

    m = sub.add_parser("amplitude", parents=[common], help="integrate or analyze an amplitude model")
    m.add_argument("--model", required=True, help="JSON written by `coeffs`")
    m.add_argument("--task", required=True, choices=["integrate", "equilibria", "diagram", "hysteresis"])
    m.add_argument("--out", help="CSV output")
    m.add_argument("--init", help="comma-separated initial amplitudes")
    m.add_argument("--tend", type=float, default=1.0, help="slow-time horizon for integrate")
    m.add_argument("--length", type=float, default=10.0, help="slow-space domain for GL")
    m.add_argument("--nx", type=int, default=200, help="GL grid points")
    m.add_argument("--b-path", help="comma-separated b values for hysteresis")

    s = sub.add_parser("simulate", parents=[common], help="direct numerical simulation")
    s.add_argument("--params", required=True)
    s.add_argument("--geometry", choices=["1d", "2d", "radial"])
    s.add_argument("--domain", help="L, Lx,Ly or R in units of pi")
    s.add_argument("--grid", help="resolution: N or Nx,Ny")
    s.add_argument("--ic", choices=["steady", "random", "pulse", "bump", "wavepacket"])
    s.add_argument("--seed", type=int)
    s.add_argument("--tend", type=float)
    s.add_argument("--snap-every", dest="snap_every", type=float)
    s.add_argument("--scheme", choices=["spectral", "fd"])
    s.add_argument("--out", help="snapshot directory")

    sp = sub.add_parser("spectrum", parents=[common], help="cosine spectrum of a snapshot")
    sp.add_argument("--series", required=True, help="snapshot directory")
    sp.add_argument("--index", type=int, default=-1)
    sp.add_argument("--out")

    e = sub.add_parser("envelope", parents=[common], help="envelopes and front speeds")
    e.add_argument("--series", required=True)
    e.add_argument("--kc2", type=float, help="carrier wavenumber squared (default: Turing kc2)")
    e.add_argument("--level", type=float, help="front level (default: half the largest envelope)")
    e.add_argument("--out")

    k = sub.add_parser("corematch", parents=[common], help="target-pattern core fit")
    k.add_argument("--series", required=True, nargs="+")
    k.add_argument("--out")

    v = sub.add_parser("validate", parents=[common], help="run the acceptance criteria")
    v.add_argument("--suite", default="fast", choices=sorted(validation.SUITES))
    v.add_argument("--criteria", help="comma-separated criterion ids (overrides --suite)")
    v.add_argument("--strict", action="store_true", help="exit 1 when a criterion fails")
    v.add_argument("--out", help="JSON report")
    return ap


COMMANDS = {"analyze": cmd_analyze, "coeffs": cmd_coeffs, "amplitude": cmd_amplitude, "simulate": cmd_simulate,
            "spectrum": cmd_spectrum, "envelope": cmd_envelope, "corematch": cmd_corematch,
            "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = _Out(args.quiet, args.json)
    t0 = time.time()
    try:
        config, outputs = COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if outputs:
        first = Path(outputs[0])
        outdir = first.parent
        seed = config.get("simulate", {}).get("seed", getattr(args, "seed", None))
        write_manifest(outdir, args.command, argv, config, outputs, time.time() - t0, seed=seed)
    if args.command == "validate" and args.strict and getattr(args, "_failed", False):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
