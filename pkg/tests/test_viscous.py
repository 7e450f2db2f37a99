import numpy as np
import pytest

from vanvisc.errors import CFLViolation, DomainTooSmall, NotLaxPair
from vanvisc.riemann import lax_curve
from vanvisc.system import eigen_frame, preset_model
from vanvisc.viscous import shock_profile, solve_viscous, tail_bound_check

B = preset_model("burgers")
P = preset_model("p_system")


def test_burgers_profile_matches_tanh():
    pr = shock_profile(B, [1.0], [0.0])
    s = np.linspace(-40, 40, 2001)
    exact = 0.5 - 0.5 * np.tanh(s / 4.0)
    assert np.max(np.abs(pr.value(s)[:, 0] - exact)) < 1e-8
    assert abs(pr.centering_residual()) < 1e-6
    assert pr.ode_residual(800) < 1e-8


def test_burgers_profile_centering_by_symmetry():
    pr = shock_profile(B, [1.0], [0.0])
    # omega - 1/2 is odd about the center, so both mass integrals agree at 0
    assert pr.value(0.0)[0] == pytest.approx(0.5, abs=1e-8)


def test_profile_rescaling():
    pr = shock_profile(B, [1.0], [0.0])
    eps = 0.01
    s = np.linspace(-0.4, 0.4, 101)
    exact = 0.5 - 0.5 * np.tanh(s / (4 * eps))
    assert np.max(np.abs(pr.value_rescaled(s, eps)[:, 0] - exact)) < 1e-8


def test_p_system_profiles_both_families():
    um = np.array([1.0, 0.0])
    for fam, s in ((1, -0.3), (2, -0.25)):
        up = lax_curve(P, fam, um, s)
        pr = shock_profile(P, um, up)
        assert pr.family == fam
        lo = pr.value(pr.s_lo - pr.center_shift - 1.0)
        hi = pr.value(pr.s_hi - pr.center_shift + 1.0)
        assert np.linalg.norm(lo - um) < 1e-8
        assert np.linalg.norm(hi - up) < 1e-8
        assert abs(pr.centering_residual()) < 1e-6
        assert pr.ode_residual(500) < 1e-8


def test_profile_lambda_monotone_along_family():
    um = np.array([1.0, 0.0])
    up = lax_curve(P, 1, um, -0.3)
    pr = shock_profile(P, um, up)
    s = np.linspace(pr.s_lo, pr.s_hi, 400) - pr.center_shift
    lams = [eigen_frame(P, w).lambdas[0] for w in pr.value(s)]
    assert np.all(np.diff(lams) < 1e-10)


def test_tail_bounds():
    pr = shock_profile(B, [1.0], [0.0])
    rep = tail_bound_check(pr)
    assert rep["c1"] <= 1.0
    assert rep["c2"] <= 1.0
    assert rep["max_violation"] <= 0.01
    # at s = 0 the envelope is just C1 sigma^2, so C1 >= |omega'(0)|
    assert rep["c1"] >= abs(pr.deriv(0.0)[0])

    um = np.array([1.0, 0.0])
    rep = tail_bound_check(shock_profile(P, um, lax_curve(P, 1, um, -0.3)))
    assert np.isfinite(rep["c1"]) and np.isfinite(rep["c2"])
    assert rep["max_violation"] <= 0.01


def test_not_lax_pair_errors():
    with pytest.raises(NotLaxPair):
        shock_profile(B, [0.0], [1.0])     # rarefaction pair
    with pytest.raises(NotLaxPair):
        shock_profile(P, np.array([1.0, 0.0]), np.array([1.1, 0.5]))  # off locus


def test_solve_viscous_constant_data():
    sol = solve_viscous(B, 0.02, lambda x: np.full((np.size(x), 1), 0.7),
                        0.5, 0.005, domain=(-3, 3), vmax=1.0)
    assert np.max(np.abs(sol.final() - 0.7)) == 0.0


def test_solve_viscous_travelling_wave():
    eps, dx = 0.01, 0.01 / 8
    exact = lambda x: 0.5 - 0.5 * np.tanh(np.asarray(x) / (4 * eps))
    sol = solve_viscous(B, eps, lambda x: exact(x)[:, None], 1.0, dx,
                        domain=(-3.0, 4.0), vmax=1.2)
    err = np.sum(np.abs(sol.final()[:, 0] - exact(sol.x - 0.5))) * dx
    assert err <= 5 * dx


def test_solve_viscous_rarefaction_near_exact():
    eps = 0.02
    dx = eps / 4
    from vanvisc.piecewise import PiecewiseConstant

    data = PiecewiseConstant([0.0], [[0.0], [1.0]])
    tau = 1.0
    sol = solve_viscous(B, eps, data, tau, dx, vmax=1.2)
    xr = np.clip(sol.x / tau, 0.0, 1.0)
    err = np.sum(np.abs(sol.final()[:, 0] - xr)) * dx
    assert err <= 3.0 * np.sqrt(eps)


def test_solve_viscous_conservation():
    init = lambda x: (0.3 * np.exp(-np.asarray(x) ** 2 / 0.1))[:, None]
    sol = solve_viscous(B, 0.02, init, 0.5, 0.005, domain=(-4, 4), vmax=0.5,
                        out_times=[0.0, 0.5])
    assert abs(sol.mass(-1)[0] - sol.mass(0)[0]) < 1e-10


def test_solve_viscous_tv_bound_and_refinement():
    from vanvisc.piecewise import PiecewiseConstant

    data = PiecewiseConstant([-0.3, 0.2], [[0.8], [0.1], [0.5]])
    eps = 0.02
    tv0 = data.total_variation()
    sol1 = solve_viscous(B, eps, data, 0.5, eps / 4, vmax=1.0)
    assert sol1.total_variation() <= 1.5 * tv0
    sol2 = solve_viscous(B, eps, data, 0.5, eps / 8, vmax=1.0)
    from vanvisc.piecewise import l1_distance_to_grid

    # first-order sanity: halving dx moves the answer by O(dx)
    u2_on_1 = np.interp(sol1.x, sol2.x, sol2.final()[:, 0])
    diff = np.sum(np.abs(u2_on_1 - sol1.final()[:, 0])) * (eps / 4)
    assert diff < 10 * (eps / 4) * tv0


def test_solve_viscous_errors():
    with pytest.raises(CFLViolation):
        solve_viscous(B, 0.01, lambda x: np.zeros((np.size(x), 1)), 0.1, 0.01)
    from vanvisc.piecewise import PiecewiseConstant

    data = PiecewiseConstant([0.0], [[1.0], [0.0]])
    with pytest.raises(DomainTooSmall):
        solve_viscous(B, 0.02, data, 1.0, 0.005, domain=(-0.5, 0.5), vmax=1.2)
