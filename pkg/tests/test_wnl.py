import math
from dataclasses import replace

import numpy as np
import pytest

from brusselator import linstab, wnl
from brusselator.model import NondimParams
from brusselator.modes import admissible_modes
from brusselator.wnl import (AmplitudeModel, KernelError, SolvabilityError, critical_kernels,
                             solve_harmonic)

from conftest import params
from oracles import grid_center_manifold

FIG31 = dict(Q2=3.0, eta2=0.36, Gamma=80.0)
FIG33 = dict(Q2=0.14, eta2=0.36, Gamma=150.0)
CASES_2D = {
    "4.1": (dict(Q2=3.0, eta2=0.36, Gamma=8.0), 0.05, "1", "sqrt(3)", (8, 16)),
    "4.2": (dict(Q2=3.5, eta2=0.81, Gamma=30.3, n=2.0), 0.02, "1", "1", (16, 16)),
    "4.3": (dict(Q2=8.0, eta2=0.36, Gamma=11.93), 0.03, "2", "2", (24, 24)),
}


def above(eps, **kw):
    p = params(**kw)
    return p.with_epsilon(linstab.turing_threshold(p).b_turing, eps)


def modeset(name):
    kw, eps, lx, ly, _ = CASES_2D[name]
    return admissible_modes(above(eps, **kw), lx, ly)


def test_kernels_fig31():
    p = params(**FIG31)
    th = linstab.turing_threshold(p)
    ker = critical_kernels(p, th.b_turing, th.kc2)
    scale = np.max(np.abs(ker.matrix))
    assert max(ker.residuals) < 1e-12 * scale
    assert ker.rho[0] == 1.0
    assert float(ker.rho @ ker.psi_adj) == pytest.approx(1.0, abs=1e-14)


def test_kernels_linear_diffusion_hand_solved():
    G, e2 = 5.0, 0.25
    p = NondimParams(Q=1.0, eta=math.sqrt(e2), b=4.0, Gamma=G, m=0.0, n=0.0)
    ker = critical_kernels(p, 4.0, G)
    # Gamma K - Gamma I = Gamma [[2, 1], [-4/e2, -2/e2]]
    assert np.allclose(ker.rho, [1.0, -2.0], atol=1e-13)
    assert np.allclose(ker.psi_adj, np.array([1.0, e2 / 2]) / (1 - e2), atol=1e-13)


def test_kernels_reject_regular_matrix():
    p = params(**FIG31)
    th = linstab.turing_threshold(p)
    with pytest.raises(KernelError):
        critical_kernels(p, th.b_turing * 1.2, th.kc2)


def test_solve_harmonic_basic():
    p = params(**FIG31)
    th = linstab.turing_threshold(p)
    ker = critical_kernels(p, th.b_turing, th.kc2)
    assert np.array_equal(solve_harmonic(ker.matrix, np.zeros(2), ker), np.zeros(2))
    M4 = wnl.operator_matrix(p, 4 * th.kc2, th.b_turing)
    rhs = np.array([0.3, -1.7])
    assert np.allclose(solve_harmonic(M4, rhs), np.linalg.solve(M4, rhs), rtol=1e-14)
    with pytest.raises(SolvabilityError):
        solve_harmonic(ker.matrix, ker.rho, ker)
    with pytest.raises(SolvabilityError):
        solve_harmonic(ker.matrix, np.array([1.0, 0.0]))
    # range-space rhs: solution orthogonal to rho and solving the system
    rhs = ker.matrix @ np.array([0.2, 0.7])
    x = solve_harmonic(ker.matrix, rhs, ker)
    assert np.allclose(ker.matrix @ x, rhs, atol=1e-12 * np.max(np.abs(rhs)))
    assert abs(float(ker.rho @ x)) < 1e-12


def test_gl_w21_residual():
    gl = wnl.ginzburg_landau_coeffs(params(Q2=3.0, eta2=0.36, Gamma=800.0))
    D = linstab.diffusion_matrix(params(Q2=3.0, eta2=0.36, Gamma=800.0), gl.b_c)
    scale = 2 * math.sqrt(gl.k2) * np.max(np.abs(D @ gl.rho))
    assert gl.diagnostics["w21_residual"] < 1e-12 * scale
    assert math.isfinite(gl.coefficients["nu"])


def test_second_order_harmonics_dense_oracle():
    p = params(**FIG31)
    sl = wnl.stuart_landau_coeffs(p)
    b, k2 = sl.b_c, sl.k2
    Q, e2 = p.Q, p.eta2
    r0, r1 = sl.rho
    tab = wnl.expansion_tables(p, b)
    kin = p.Gamma * (b / Q * r0 * r0 + 2 * Q * r0 * r1) * np.array([1.0, -1.0 / e2])
    # w1 = a rho cos(kx): the square splits into a mean and a cos(2kx) half
    S0 = 0.5 * kin
    S2 = 0.5 * (kin - 4 * k2 * np.array([tab.D1[0, 0] * r0 * r0, tab.D1[1, 1] * r1 * r1]))
    h0 = np.linalg.solve(wnl.operator_matrix(p, 0.0, b), -S0)
    h2 = np.linalg.solve(wnl.operator_matrix(p, 4 * k2, b), -S2)
    ex = sl.expansion
    got0 = [ex.u.terms[((2, 0), (0, 0))], ex.v.terms[((2, 0), (0, 0))]]
    got2 = [ex.u.terms[((2, 0), (2, 0))], ex.v.terms[((2, 0), (2, 0))]]
    assert np.allclose(got0, h0, rtol=1e-12)
    assert np.allclose(got2, h2, rtol=1e-12)


def test_expansion_tables():
    p = params(**FIG31)
    tab = wnl.expansion_tables(p, 5.3028)
    assert tab.b_corrections[0] == 0.0
    assert np.allclose(np.diag(tab.D1), [1.0, 1.0 / 0.36])
    assert np.allclose(tab.D2, 0.0)
    lin = wnl.expansion_tables(NondimParams(Q=1.0, eta=0.5, b=4.0, Gamma=1.0, m=0.0, n=0.0), 4.0)
    assert np.all(lin.D1 == 0) and np.all(lin.D2 == 0)
    t2 = wnl.expansion_tables(params(Q2=3.5, eta2=0.81, n=2.0), 3.9542)
    vbar = 3.9542 / math.sqrt(3.5)
    assert t2.D1[1, 1] == pytest.approx(3.0 / 0.81 * vbar, rel=1e-14)
    assert t2.D2[1, 1] == pytest.approx(1.0 / 0.81, rel=1e-14)


@pytest.mark.parametrize("kw", [FIG31, FIG33, dict(Q2=3.5, eta2=0.81, Gamma=30.3, n=2.0)])
def test_second_order_solvability(kw):
    sl = wnl.stuart_landau_coeffs(params(**kw))
    assert sl.diagnostics["second_order_solvability"] < 1e-10


def test_criticality_signs():
    sup = wnl.stuart_landau_coeffs(params(**FIG31)).coefficients
    sub = wnl.stuart_landau_coeffs(params(**FIG33)).coefficients
    assert sup["sigma"] > 0 and sup["L"] > 0
    assert sub["sigma"] > 0 and sub["L"] < 0


@pytest.mark.parametrize("kw", [FIG31, FIG33, dict(Q2=3.5, eta2=0.81, Gamma=30.3, n=2.0),
                                dict(Q2=2.0, eta2=0.5, Gamma=20.0, m=0.0, n=0.0)])
def test_sigma_is_threshold_derivative(kw):
    # sigma = d(growth rate)/d(mu) at b = b_c (1 + mu), at fixed k_c^2
    p = params(**kw)
    sl = wnl.stuart_landau_coeffs(p)
    h = 1e-6
    lam = [float(linstab.max_growth(p, sl.k2, sl.b_c * (1 + s * h))) for s in (1, -1)]
    assert sl.coefficients["sigma"] == pytest.approx((lam[0] - lam[1]) / (2 * h), rel=1e-6)


@pytest.mark.parametrize("Gamma", [80.0, 800.0])
def test_nu_is_curvature_of_growth_rate(Gamma):
    p = params(Q2=3.0, eta2=0.36, Gamma=Gamma)
    gl = wnl.ginzburg_landau_coeffs(p)
    kc = math.sqrt(gl.k2)
    h = 1e-3 * kc

    def lam(k):
        return float(linstab.max_growth(p, k * k, gl.b_c))

    curv = (lam(kc + h) - 2 * lam(kc) + lam(kc - h)) / h**2
    assert gl.coefficients["nu"] == pytest.approx(-0.5 * curv, rel=1e-5)
    assert gl.diagnostics["D_rho_psi"] == pytest.approx(0.0, abs=1e-9 * np.max(np.abs(gl.rho)) * gl.k2)


def test_gamma_scaling_of_gl():
    g80 = wnl.ginzburg_landau_coeffs(params(Q2=3.0, eta2=0.36, Gamma=80.0)).coefficients
    g800 = wnl.ginzburg_landau_coeffs(params(Q2=3.0, eta2=0.36, Gamma=800.0)).coefficients
    assert g800["nu"] == pytest.approx(g80["nu"], rel=1e-9)
    assert g800["sigma"] == pytest.approx(10 * g80["sigma"], rel=1e-9)
    assert g800["L"] == pytest.approx(10 * g80["L"], rel=1e-9)


def test_gl_fig32_values():
    gl = wnl.ginzburg_landau_coeffs(params(Q2=3.0, eta2=0.36, Gamma=800.0)).coefficients
    assert gl["sigma"] > 0 and gl["L"] > 0 and gl["nu"] > 0


def test_rho_gauge():
    # scaling rho by c rescales the amplitude by 1/c, so L picks up c^2
    p = params(Q2=3.0, eta2=0.36, Gamma=800.0)
    a = wnl.ginzburg_landau_coeffs(p)
    b = wnl.ginzburg_landau_coeffs(p, rho_scale=2.0)
    assert float(b.rho @ b.psi_adj) == pytest.approx(1.0, abs=1e-14)
    assert b.coefficients["sigma"] == pytest.approx(a.coefficients["sigma"], rel=1e-10)
    assert b.coefficients["nu"] == pytest.approx(a.coefficients["nu"], rel=1e-10)
    assert b.coefficients["L"] == pytest.approx(4 * a.coefficients["L"], rel=1e-10)
    # the physically meaningful saturated amplitude sqrt(sigma/L) |rho| is gauge invariant
    pa = math.sqrt(a.coefficients["sigma"] / a.coefficients["L"]) * abs(a.rho[0])
    pb = math.sqrt(b.coefficients["sigma"] / b.coefficients["L"]) * abs(b.rho[0])
    assert pb == pytest.approx(pa, rel=1e-10)


def test_cubic_against_grid_oracle_1d():
    p = above(0.1, **FIG31)
    cp = wnl.critical_point_1d(p, "2")
    ex = wnl.amplitude_expansion(cp, 3)
    o = grid_center_manifold(cp.params, cp.b_c, (cp.Lx, None), cp.modes, (32, 1),
                             ex.kernels.rho, ex.kernels.psi_adj)
    assert ex.coefficient(0, (3, 0)) == pytest.approx(o[(0, "self")], rel=1e-5)


@pytest.mark.parametrize("name", sorted(CASES_2D))
def test_cubic_against_grid_oracle_2d(name):
    ms = modeset(name)
    N = CASES_2D[name][4]
    cp = wnl.critical_point(above(CASES_2D[name][1], **CASES_2D[name][0]), ms)
    ex = wnl.amplitude_expansion(cp, 3)
    o = grid_center_manifold(cp.params, cp.b_c, (cp.Lx, cp.Ly), cp.modes, N,
                             ex.kernels.rho, ex.kernels.psi_adj)
    nv = len(cp.modes)
    for k in range(nv):
        self_mono = tuple(3 if i == k else 0 for i in range(nv)) + (0,)
        assert ex.coefficient(k, self_mono) == pytest.approx(o[(k, "self")], rel=1e-5)
        if nv == 2:
            cross = tuple(1 if i == k else 2 for i in range(nv)) + (0,)
            assert ex.coefficient(k, cross) == pytest.approx(o[(k, "cross")], rel=1e-5)


def test_linear_diffusion_matches_grid_oracle():
    p = params(Q2=1.0, eta2=0.2, Gamma=10.0, m=0.0, n=0.0)
    p = p.with_b(4.0 * 1.01)
    cp = wnl.critical_point_1d(p, "3")
    ex = wnl.amplitude_expansion(cp, 3)
    o = grid_center_manifold(cp.params, cp.b_c, (cp.Lx, None), cp.modes, (32, 1),
                             ex.kernels.rho, ex.kernels.psi_adj)
    assert ex.coefficient(0, (3, 0)) == pytest.approx(o[(0, "self")], rel=1e-5)


def test_coupled_fig43_symmetry_and_reduction():
    ms = modeset("4.3")
    assert ms.indices == [(2, 4), (4, 2)]
    p = above(0.03, **CASES_2D["4.3"][0])
    c = wnl.coupled_landau_coeffs(p, ms)
    co = c.coefficients
    assert co["L1"] == pytest.approx(co["L2"], rel=1e-9)
    assert co["R1"] == pytest.approx(co["R2"], rel=1e-9)
    assert c.diagnostics["sigma_mismatch"] < 1e-9 * co["sigma"]
    assert not c.diagnostics["off_structure_terms"]
    # A2 = 0 leaves the Stuart-Landau equation of the single planform
    single = replace(ms, modes=ms.modes[:1])
    sl = wnl.stuart_landau_coeffs(p, single).coefficients
    assert sl["sigma"] == pytest.approx(co["sigma"], rel=1e-10)
    assert sl["L"] == pytest.approx(co["L1"], rel=1e-10)
    A = 0.37
    assert np.allclose(c.rhs([A, 0.0]), [co["sigma"] * A - co["L1"] * A**3, 0.0])


def test_coupled_rejects_wrong_structure():
    with pytest.raises(ValueError):
        wnl.coupled_landau_coeffs(above(0.05, **CASES_2D["4.1"][0]), modeset("4.1"))


def fig44():
    p = above(0.01, Q2=4.0, eta2=0.3025, Gamma=23.054)
    return p, admissible_modes(p, "2", "2*sqrt(3)")


def test_resonant_fig44():
    p, ms = fig44()
    assert ms.resonance == "resonant" and ms.indices == [(3, 9), (6, 0)]
    r = wnl.resonant_coeffs(p, ms)
    co = r.coefficients
    assert abs(co["L1"]) > 1e-3 and abs(co["L2"]) > 1e-3
    assert co["sigma1"] > 0 and co["sigma2"] > 0
    assert r.amplitude_scale == pytest.approx(1e-4)
    with pytest.raises(ValueError):
        wnl.coupled_landau_coeffs(p, ms)
    # quadratic terms removed: same structure as the coupled Landau system
    z = replace(r, coefficients=dict(co, L1=0.0, L2=0.0))
    A1, A2 = 0.3, -0.2
    expect = [co["sigma1"] * A1 + co["R1"] * A1 * A2**2 + co["S1"] * A1**3,
              co["sigma2"] * A2 + co["R2"] * A1**2 * A2 + co["S2"] * A2**3]
    assert np.allclose(z.rhs([A1, A2]), expect, rtol=1e-14)


def test_resonant_rejects_nonresonant():
    p = above(0.03, **CASES_2D["4.3"][0])
    with pytest.raises(ValueError):
        wnl.resonant_coeffs(p, modeset("4.3"))


def test_quintic_fig33_limits():
    p = params(**FIG33)
    sl = wnl.stuart_landau_coeffs(p).coefficients
    devs = []
    for eps in (0.02, 0.01):
        q = wnl.quintic_coeffs(p, eps=eps)
        c = q.coefficients
        assert c["sigma_bar"] > 0 and c["L_bar"] < 0 and c["R_bar"] < 0
        assert not q.diagnostics["warnings"]
        devs.append((abs(c["sigma_bar"] / sl["sigma"] - 1), abs(c["L_bar"] / sl["L"] - 1),
                     abs(c["R_bar"])))
    # each correction is O(eps^2): halving eps quarters it
    for a, b in zip(*devs):
        assert b == pytest.approx(a / 4, rel=1e-9)


def test_quintic_warns_when_supercritical():
    q = wnl.quintic_coeffs(params(**FIG31), eps=0.1)
    assert q.diagnostics["warnings"]


def test_amplitude_model_validation_and_json():
    with pytest.raises(ValueError):
        AmplitudeModel("cubic_SL", {"sigma": 1.0})
    with pytest.raises(ValueError):
        AmplitudeModel("hopf", {"sigma": 1.0})
    gl = wnl.ginzburg_landau_coeffs(params(**FIG31), eps=0.1)
    d = gl.to_json()
    back = AmplitudeModel.from_json(d)
    assert back.coefficients == gl.coefficients
    assert np.allclose(back.w21, gl.w21) and back.eps == 0.1
    assert any(h["mode"] == [2, 0] for h in d["w2_harmonics"])


def test_wnl_solution_structure():
    p = above(0.1, **FIG31)
    sl = wnl.stuart_landau_coeffs(p)
    x = np.linspace(0, 2 * np.pi, 101)
    u, v = wnl.wnl_solution(sl, 0.0, x, order=2, params=p)
    assert np.all(u == p.Q) and np.allclose(v, p.b / p.Q, rtol=1e-14)
    A = 1.3
    u1, _ = wnl.wnl_solution(sl, A, x, order=1)
    assert np.allclose(u1, 0.1 * A * sl.rho[0] * np.cos(math.sqrt(sl.k2) * x))
    u2, _ = wnl.wnl_solution(sl, A, x, order=2)
    diff = u2 - u1
    # the correction carries a mean shift and the second harmonic
    k = math.sqrt(sl.k2)
    basis = np.column_stack([np.ones_like(x), np.cos(2 * k * x)])
    coef, *_ = np.linalg.lstsq(basis, diff, rcond=None)
    assert np.allclose(basis @ coef, diff, atol=1e-12)
    assert abs(coef[0]) > 0 and abs(coef[1]) > 0


def test_wnl_solution_2d_needs_y():
    p = above(0.05, **CASES_2D["4.1"][0])
    sl = wnl.stuart_landau_coeffs(p, modeset("4.1"))
    with pytest.raises(ValueError):
        wnl.wnl_solution(sl, 1.0, np.linspace(0, 1, 5))
