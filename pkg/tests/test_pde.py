import numpy as np
import pytest

from brusselator import analysis, linstab, pde
from brusselator.model import NondimParams, kinetics
from brusselator.pde import Grid, PositivityError, SimConfig

from conftest import params


@pytest.fixture
def p31():
    return params(b=5.3028 * 1.01)


def test_grid_validation():
    with pytest.raises(ValueError):
        pde.line_grid(N=15)
    with pytest.raises(ValueError):
        pde.line_grid(N=8)
    with pytest.raises(ValueError):
        pde.line_grid(L=-1.0, N=32)
    with pytest.raises(ValueError):
        Grid("sphere", (1.0,), (32,))
    with pytest.raises(ValueError):
        Grid("rectangle", (1.0,), (32,))
    g = pde.rectangle_grid(2.0, 3.0, 16, 24)
    assert g.shape == (16, 24)
    assert Grid.from_json(g.to_json()) == g
    assert np.sum(g.weights) == pytest.approx(6.0)
    r = pde.radial_grid(3.0, 32)
    assert np.sum(r.weights) == pytest.approx(np.pi * 9.0, rel=1e-12)


def test_simconfig_validation():
    with pytest.raises(ValueError):
        SimConfig(t_end=1.0, safety=0.0)
    with pytest.raises(ValueError):
        SimConfig(t_end=1.0, scheme="chebyshev")
    assert SimConfig(t_end=1.0, scheme="fd").scheme == "finite_difference"


def test_initial_steady(p31):
    f = pde.make_initial(p31, pde.line_grid(N=32))
    fu, fv = kinetics(p31, f.u, f.v)
    assert np.all(fu == 0) or np.max(np.abs(fu)) < 1e-12
    assert np.max(np.abs(fv)) < 1e-12
    assert np.ptp(f.u) == 0 and np.ptp(f.v) == 0


def test_initial_random_deterministic(p31):
    g = pde.rectangle_grid(1.0, 1.0, 16, 16)
    a = pde.make_initial(p31, g, "random", seed=7)
    b = pde.make_initial(p31, g, "random", seed=7)
    c = pde.make_initial(p31, g, "random", seed=8)
    assert np.array_equal(a.u, b.u) and np.array_equal(a.v, b.v)
    assert not np.array_equal(a.u, c.u)
    # default amplitude 1e-2 * eps * u_bar with eps = 0.1
    assert np.max(np.abs(a.u - p31.Q)) <= 1e-3 * p31.Q


def test_initial_pulse_mass(p31):
    g = pde.line_grid(L=20.0, N=256)
    amp, width = 0.1, 1.0
    f = pde.make_initial(p31, g, "pulse", amp=amp, width=width)
    extra = pde.integral(g, f.u) - p31.Q * 20.0
    # Gaussian well inside the domain: amp * width * sqrt(pi)
    assert extra == pytest.approx(amp * width * np.sqrt(np.pi), rel=1e-10)


def test_initial_rejects_large_amplitude(p31):
    with pytest.raises(PositivityError):
        pde.make_initial(p31, pde.line_grid(N=32), "random", amp=10.0)
    with pytest.raises(ValueError):
        pde.make_initial(p31, pde.line_grid(N=32), "plaid", amp=0.1)


@pytest.mark.parametrize("grid,scheme", [
    (pde.line_grid(N=64), "spectral"), (pde.line_grid(N=64), "fd"),
    (pde.rectangle_grid(np.pi, np.pi, 16, 16), "spectral"), (pde.radial_grid(10.0, 64), "fd")])
def test_steady_state_preserved(p31, grid, scheme):
    s = pde.simulate(p31, grid, SimConfig(t_end=10.0, scheme=scheme), pde.make_initial(p31, grid))
    assert np.max(np.abs(s.u[-1] - p31.Q)) < 1e-10
    assert np.max(np.abs(s.v[-1] - p31.b / p31.Q)) < 1e-10
    assert s.times[-1] == pytest.approx(10.0)


def test_deterministic_bitwise(p31):
    g = pde.line_grid(N=32)
    cfg = SimConfig(t_end=2.0, snap_every=1.0)
    a = pde.simulate(p31, g, cfg, pde.make_initial(p31, g, "random", seed=3, amp=0.05))
    b = pde.simulate(p31, g, cfg, pde.make_initial(p31, g, "random", seed=3, amp=0.05))
    assert a.times == b.times
    assert all(np.array_equal(x, y) for x, y in zip(a.u, b.u))


def test_snapshot_times_strictly_increase(p31):
    g = pde.line_grid(N=32)
    s = pde.simulate(p31, g, SimConfig(t_end=1.0, snap_every=0.25), pde.make_initial(p31, g, "random", amp=0.01))
    assert np.all(np.diff(s.times) > 0)
    assert s.times == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        s.append(0.5, s.u[0], s.v[0], 0.0)


@pytest.mark.parametrize("scheme", ["spectral", "fd"])
def test_symmetry_preserved(p31, scheme):
    g = pde.line_grid(N=64)
    f = pde.make_initial(p31, g, "pulse", amp=0.05, width=0.5)
    s = pde.simulate(p31, g, SimConfig(t_end=2.0, scheme=scheme), f)
    u = s.u[-1]
    assert np.max(np.abs(u - u[::-1])) < 1e-9


def test_mass_balance(p31):
    g = pde.line_grid(N=64)
    s = pde.simulate(p31, g, SimConfig(t_end=5.0, snap_every=0.5),
                     pde.make_initial(p31, g, "random", amp=0.05, seed=2))
    res = pde.mass_balance(s)
    mass = max(pde.integral(g, u + p31.eta2 * v) for u, v in zip(s.u, s.v))
    assert np.max(np.abs(res)) / mass < 1e-6
    steady = pde.simulate(p31, g, SimConfig(t_end=1.0, snap_every=0.5), pde.make_initial(p31, g))
    assert np.max(np.abs(pde.mass_balance(steady))) < 1e-10


@pytest.mark.parametrize("scheme", ["spectral", "fd"])
def test_pure_diffusion_conserves(scheme):
    p = NondimParams.from_squares(3.0, 0.36, 5.0, 0.0)
    g = pde.rectangle_grid(2.0, 3.0, 16, 16)
    f = pde.make_initial(p, g, "pulse", amp=0.5, width=0.4, center=(0.5, 1.0))
    s = pde.simulate(p, g, SimConfig(t_end=0.5, scheme=scheme), f)
    for a, b in ((f.u, s.u[-1]), (f.v, s.v[-1])):
        assert abs(pde.integral(g, b) - pde.integral(g, a)) < 1e-8 * pde.integral(g, a)
    assert np.ptp(s.u[-1]) < np.ptp(f.u)


def test_spectral_vs_fd(p31):
    # FD at twice the resolution, compared through the cosine interpolant
    Lc, Nc, Nf = 2 * np.pi, 64, 128
    gc, gf = pde.line_grid(Lc, Nc), pde.line_grid(Lc, Nf)
    cfg = dict(t_end=1.0, rtol=1e-10, atol=1e-12)
    fc = pde.make_initial(p31, gc, "pulse", amp=0.05, width=1.0)
    ff = pde.make_initial(p31, gf, "pulse", amp=0.05, width=1.0)
    sc = pde.simulate(p31, gc, SimConfig(scheme="spectral", **cfg), fc)
    sf = pde.simulate(p31, gf, SimConfig(scheme="fd", **cfg), ff)
    c = analysis.forward_cosine(sf.u[-1])[:Nc] * np.sqrt(Nc / Nf)
    restricted = analysis.inverse_cosine(c)
    assert np.max(np.abs(restricted - sc.u[-1])) < 1e-4


def test_fd_second_order_convergence(p31):
    L = 2 * np.pi
    ref_g = pde.line_grid(L, 64)
    cfg = dict(t_end=0.5, rtol=1e-11, atol=1e-13)
    ref = pde.simulate(p31, ref_g, SimConfig(**cfg), pde.make_initial(p31, ref_g, "pulse", amp=0.05, width=1.0))
    errs = []
    for N in (32, 64):
        g = pde.line_grid(L, N)
        s = pde.simulate(p31, g, SimConfig(scheme="fd", **cfg), pde.make_initial(p31, g, "pulse", amp=0.05, width=1.0))
        exact = analysis.evaluate_cosine_series(analysis.forward_cosine(ref.u[-1]), (L,), g.coords[0])
        errs.append(np.max(np.abs(s.u[-1] - exact)))
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_spectral_resolution_convergence(p31):
    L = 2 * np.pi
    cfg = dict(t_end=0.5, rtol=1e-11, atol=1e-13)
    out = {}
    for N in (32, 64):
        g = pde.line_grid(L, N)
        s = pde.simulate(p31, g, SimConfig(**cfg), pde.make_initial(p31, g, "pulse", amp=0.05, width=1.0))
        out[N] = analysis.forward_cosine(s.u[-1]) * np.sqrt(1.0 / N)
    # low modes agree once resolved
    assert np.max(np.abs(out[64][:32] - out[32])) < 1e-6


def test_radial_rings_at_critical_wavelength():
    p = params(Gamma=80.0)
    th = linstab.turing_threshold(p)
    p = p.with_epsilon(th.b_turing, 0.08)
    g = pde.radial_grid(6 * np.pi, 128)
    f = pde.make_initial(p, g, "bump", amp=0.05, width=0.3)
    s = pde.simulate_radial(p, g, SimConfig(t_end=10.0), f)
    u = s.u[-1] - p.Q
    r = g.coords[0]
    peaks = [i for i in range(1, r.size - 1) if r[i] < 3 * np.pi and u[i] > u[i - 1] and u[i] >= u[i + 1]]
    spacing = np.median(np.diff(r[peaks]))
    assert spacing == pytest.approx(2 * np.pi / np.sqrt(th.kc2), rel=0.1)


def test_simulate_radial_requires_radial(p31):
    with pytest.raises(ValueError):
        pde.simulate_radial(p31, pde.line_grid(N=32), SimConfig(t_end=1.0))


def test_positivity_abort():
    p = params(b=5.0)
    g = pde.line_grid(N=32)
    f = pde.make_initial(p, g)
    f.u[3] = -1.0
    with pytest.raises(PositivityError):
        pde.simulate(p, g, SimConfig(t_end=1.0), f)


def test_positivity_abort_on_step():
    # a loose error control accepts a step that drives v negative next to a large u spike
    p = params(b=5.0, Gamma=800.0)
    g = pde.line_grid(N=32)
    f = pde.make_initial(p, g)
    f.u[3] = 30.0
    with pytest.raises(PositivityError):
        pde.simulate(p, g, SimConfig(t_end=1.0, safety=1.0, rtol=1e3, atol=1e3), f)


def test_save_load_round_trip(p31, tmp_path):
    g = pde.rectangle_grid(1.0, 2.0, 16, 16)
    s = pde.simulate(p31, g, SimConfig(t_end=0.2, snap_every=0.1, seed=4),
                     pde.make_initial(p31, g, "random", amp=0.01, seed=4))
    pde.save_series(s, tmp_path / "run")
    back = pde.load_series(tmp_path / "run")
    assert back.times == s.times and back.grid == g
    assert all(np.array_equal(a, b) for a, b in zip(back.u, s.u))
    assert back.source_integral == s.source_integral
    assert back.params.Q == pytest.approx(p31.Q, rel=1e-15)
    raw = (tmp_path / "run" / "snap_00001.bin").read_bytes()
    assert len(raw) == 2 * 16 * 16 * 8
    assert np.array_equal(np.frombuffer(raw, "<f8")[:256].reshape(16, 16), s.u[1])


def test_profile_csv(p31, tmp_path):
    g = pde.radial_grid(5.0, 32)
    s = pde.simulate_radial(p31, g, SimConfig(t_end=0.1), pde.make_initial(p31, g))
    pde.export_profile_csv(s, tmp_path / "p.csv")
    data = np.loadtxt(tmp_path / "p.csv", delimiter=",", skiprows=1)
    assert data.shape == (32, 3)
    assert (tmp_path / "p.csv").read_text().startswith("r,u,v")
