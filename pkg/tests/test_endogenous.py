import numpy as np
import pytest

from epibehave.constant_cost import detect_peak
from epibehave.endogenous import (_eta_integral, calibrated_eta_hi, costate_rhs, eta_bounds,
                                  eta_integral_check, fixed_point_residual, infection_probability,
                                  sandwich_check, solve_equilibrium, v_infected)
from epibehave.errors import (AssumptionViolated, ExposureOutOfRange, IdentityViolation,
                              NoConvergence)
from epibehave.onset import i0_threshold
from epibehave.params import FineGrid, Trajectory


def test_v_infected(base):
    assert v_infected(base.with_(pi_i=0.0)) == 0.0
    assert v_infected(base) == pytest.approx(-2761.6, abs=0.1)
    assert v_infected(base.with_(pi_i=2.0, pi_r=2.0, pi_s=2.0)) == pytest.approx(2.0 / base.rho)


def test_bounds(base):
    b = eta_bounds(base)
    assert b.lo == pytest.approx(v_infected(base))
    assert b.hi - b.lo == pytest.approx(base.c / 2 / base.rho)
    assert b.hi_general > b.hi
    lo, hi = b
    assert (lo, hi) == (b.lo, b.hi)
    assert calibrated_eta_hi(base) == pytest.approx(-2254.68, abs=0.01)


def test_bounds_scale(base):
    a, b = eta_bounds(base), eta_bounds(base.with_(pi_i=2 * base.pi_i))
    assert b.lo == pytest.approx(2 * a.lo)


def test_bounds_need_severity(base):
    with pytest.raises(AssumptionViolated):
        eta_bounds(base.with_(pi_i=-1.0))


def test_costate_rhs_stationary(base):
    lo = eta_bounds(base).lo
    assert costate_rhs(lo, 1.0, 0.0, base) == pytest.approx(0.0, abs=1e-12)
    assert costate_rhs(lo + 10.0, 1.0, 0.0, base) > 0


def test_converges(equilibrium, base):
    traj, co = equilibrium
    b = eta_bounds(base)
    assert co.converged and co.final_gap < 1e-8
    assert co.gap_history[-1] == co.final_gap and len(co.convergence_log()) == co.iterations
    assert np.all(co.eta >= b.lo - 1e-9) and np.all(co.eta <= b.hi + 1e-9)
    assert np.all(co.eta < 0)
    assert abs(co.eta[-1] - b.lo) < 0.01
    assert traj.model == "endogenous" and traj.terminated_early


def test_costate_matches_rhs(equilibrium, base):
    traj, co = equilibrium
    t, eta = co.t_fine, co.eta_fine
    fine = traj.fine
    k = np.arange(100, len(t) - 100, 997)
    fd = (eta[k + 1] - eta[k - 1]) / (t[k + 1] - t[k - 1])
    rhs = costate_rhs(eta[k], fine.eps[k], fine.i[k], base)
    scale = np.maximum(np.abs(rhs), 1e-3)
    assert np.max(np.abs(fd - rhs) / scale) < 1e-4


def test_probability(equilibrium, base):
    traj, co = equilibrium
    p = infection_probability(traj)
    assert p[0] == 0.0 and p[-1] < 1.0
    assert np.all(np.diff(p) >= 0)
    assert p[-1] == pytest.approx(1 - traj.s[-1] / base.s0, abs=1e-6)
    assert np.allclose(p, co.p)


def test_probability_identity_violation(equilibrium):
    traj, _ = equilibrium
    f = traj.fine
    bad = FineGrid(f.t, f.s, f.i * 1.1, f.r, f.eps)
    doctored = Trajectory(traj.t, traj.s, traj.i, traj.r, traj.eps, traj.params, traj.step,
                          traj.horizon, True, bad, "endogenous")
    with pytest.raises(IdentityViolation):
        infection_probability(doctored)


def test_integral_form(equilibrium, base):
    traj, co = equilibrium
    assert eta_integral_check(traj, co) < 1e-3
    assert eta_integral_check(traj, co, times=[traj.t[-1]]) < 1e-6


def test_integral_lower_bound_case(base):
    t = np.linspace(0, 100, 2001)
    flat = FineGrid(t, np.full_like(t, 0.7), np.zeros_like(t), np.full_like(t, 0.3), np.ones_like(t))
    val = _eta_integral(flat, np.zeros_like(t), base)
    # trapezoid error on the exponential weight is about (h*rho)^2/12
    assert np.allclose(val, eta_bounds(base).lo, rtol=1e-9, atol=0)


def test_fixed_point(equilibrium):
    traj, co = equilibrium
    assert fixed_point_residual(traj, co) < 1e-8


def test_sandwich(equilibrium, base):
    rep = sandwich_check(base, solution=equilibrium)
    assert rep.paths_ordered and rep.peaks_ordered
    assert rep.peak_lo < rep.peak_endog < rep.peak_hi
    assert rep.peak_endog == pytest.approx(detect_peak(equilibrium[0]).i_peak)


def test_no_convergence(base):
    with pytest.raises(NoConvergence) as err:
        solve_equilibrium(base, max_iter=2)
    assert len(err.value.gap_history) == 2


def test_exposure_out_of_range(base):
    with pytest.raises(ExposureOutOfRange):
        solve_equilibrium(base.with_(pi_i=-1e6, i0=0.01))


def test_relaxation_validated(base):
    with pytest.raises(ValueError):
        solve_equilibrium(base, relaxation=0.0)


def test_barely_severe_seed_above_threshold(base):
    tiny = 1e-6
    p = base.with_(pi_i=-(base.c / 2 + tiny) / base.rho * (base.rho + base.gamma))
    b = eta_bounds(p)
    assert b.hi == pytest.approx(-tiny / p.rho)
    p = p.with_(i0=1.1 * i0_threshold(p.with_(eta=b.lo)))
    traj, co = solve_equilibrium(p, horizon=20000)
    assert co.converged
    rep = sandwich_check(p, solution=(traj, co))
    # the eta_lo model does not take off; its peak is the seed
    assert rep.peak_lo == p.i0
    assert rep.paths_ordered and rep.peaks_ordered
