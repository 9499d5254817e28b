"""
Equilibrium with an endogenous cost of infection.

The cost of infection becomes the co-state eta(t), the shadow price of the
infection probability. The equilibrium is a two-point boundary problem:
(S, I, R) run forward from the seed, eta runs backward from its stationary
value. It is solved by a forward-backward sweep on the RK4 grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .constant_cost import (DEFAULT_HORIZON, DEFAULT_STEP, detect_peak, initial_growth,
                            substeps_per_day)
from .errors import (AssumptionViolated, ConservationViolation, ExposureOutOfRange,
                     IdentityViolation, NoConvergence, NonFiniteState, SandwichViolation)
from .params import FineGrid, ModelParams, Trajectory, v_infected_value
from .phase import final_size, path_infected, peak_from_phase

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200
MIN_RELAXATION = 0.125
# truncation: daily drop in S and I both below these
TRUNC_DS = 1e-12
TRUNC_I = 1e-10
IDENTITY_TOL = 1e-6
EXPOSURE_SLACK = 1e-12


def v_infected(params: ModelParams) -> float:
    """Value of being infected: (pi_I + gamma*pi_R/rho) / (rho + gamma)."""
    return v_infected_value(params)


def _premium0(params: ModelParams) -> float:
    return params.pi_s - params.rho * v_infected(params)


@dataclass(frozen=True)
class EtaBounds:
    lo: float
    hi: float
    hi_general: float

    def __iter__(self):
        return iter((self.lo, self.hi))


def eta_bounds(params: ModelParams) -> EtaBounds:
    """Pointwise bounds on the co-state.

    ``lo`` is the stationary value -(pi_S - rho*V_I)/rho, ``hi`` the tightened
    upper bound -(pi_S - rho*V_I - c/2)/rho. ``hi_general`` keeps the looser
    bound with rho + beta in the denominator for reference.

    Raises
    ------
    AssumptionViolated
        If pi_S - c/2 <= rho*V_I.
    """
    prem = _premium0(params)
    if not prem - params.c / 2.0 > 0:
        raise AssumptionViolated("severity assumption fails: pi_S - c/2 <= rho*V_I")
    lo = -prem / params.rho
    hi = -(prem - params.c / 2.0) / params.rho
    hi_general = -(prem - params.c / 2.0) / (params.rho + params.beta)
    return EtaBounds(lo, hi, hi_general)


def calibrated_eta_hi(params: ModelParams) -> float:
    """Upper co-state value as calibrated for the constant-cost runs:
    the constant cost of infection plus (c/2)/rho."""
    return params.eta + params.c / (2.0 * params.rho)


def costate_rhs(eta, eps, i, params: ModelParams):
    """d(eta)/dt = eta*(rho + eps*beta*I) + pi_S - c/2*(1-eps)^2 - rho*V_I."""
    return (eta * (params.rho + eps * params.beta * i) + _premium0(params)
            - 0.5 * params.c * (1.0 - eps) ** 2)


@dataclass(frozen=True, eq=False)
class CostateTrajectory:
    t: np.ndarray
    eta: np.ndarray
    eps: np.ndarray
    p: np.ndarray
    converged: bool
    iterations: int
    final_gap: float
    gap_history: tuple[float, ...] = ()
    omega_history: tuple[float, ...] = ()
    t_fine: np.ndarray | None = None
    eta_fine: np.ndarray | None = None

    def convergence_log(self) -> list[dict]:
        return [{"iteration": k + 1, "gap": g, "omega": w}
                for k, (g, w) in enumerate(zip(self.gap_history, self.omega_history))]


def _pad(a: np.ndarray, n: int) -> np.ndarray:
    if len(a) >= n:
        return a[:n]
    return np.concatenate([a, np.full(n - len(a), a[-1])])


def _sup_gap(a: np.ndarray, b: np.ndarray) -> float:
    n = max(len(a), len(b))
    return float(np.max(np.abs(_pad(a, n) - _pad(b, n))))


def _forward(params: ModelParams, eta_fine: np.ndarray, h: float, nsub: int, ndays: int):
    fs, fi, fr, fe, fraw, n, status = _kernels.endogenous_forward(
        params.s0, params.i0, 0.0, params.beta, params.gamma, params.c,
        eta_fine, h, nsub, ndays, TRUNC_I, TRUNC_DS)
    if status == _kernels.NON_FINITE:
        raise NonFiniteState(f"non-finite state after {n} steps")
    if status == _kernels.CONSERVATION:
        raise ConservationViolation(f"|S+I+R-1| above tolerance after {n} steps")
    return fs, fi, fr, fe, fraw


def _backward(params: ModelParams, fi: np.ndarray, fe: np.ndarray, h: float,
              eta_terminal: float) -> np.ndarray:
    return _kernels.costate_backward(fi, fe, eta_terminal, params.beta, params.rho,
                                     params.c, _premium0(params), h)


def solve_equilibrium(params: ModelParams, horizon: float = DEFAULT_HORIZON,
                      tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                      relaxation: float = 1.0, step: float = DEFAULT_STEP,
                      ) -> tuple[Trajectory, CostateTrajectory]:
    """Forward-backward sweep for the endogenous-cost equilibrium.

    Starts from eta = eta_lo everywhere. Each pass integrates (S, I, R) with
    exposure clamp(1 + beta*eta(t)*I/c, 0, 1), truncating once the daily drop
    in S is below 1e-12 and I < 1e-10, then integrates the co-state backward
    from eta_lo at the truncation time. The update eta <- (1-w)*eta_old +
    w*eta_new is repeated until the sup-norm change of (S, I, R, eta) is
    below ``tol``. The relaxation w halves (down to 0.125) whenever the gap
    grows twice in a row.

    Raises
    ------
    AssumptionViolated, NoConvergence, ExposureOutOfRange
    """
    bounds = eta_bounds(params)
    if not 0 < relaxation <= 1:
        raise ValueError("relaxation must lie in (0, 1]")
    nsub = substeps_per_day(step)
    h = 1.0 / nsub
    ndays = max(1, int(math.floor(horizon + 1e-9)))

    eta = np.array([bounds.lo])
    prev = None
    omega = relaxation
    gaps: list[float] = []
    omegas: list[float] = []
    rises = 0
    converged = False
    for it in range(1, max_iter + 1):
        fs, fi, fr, fe, _ = _forward(params, eta, h, nsub, ndays)
        eta_new = _backward(params, fi, fe, h, bounds.lo)
        eta_next = (1.0 - omega) * _pad(eta, len(eta_new)) + omega * eta_new
        gap = _sup_gap(eta_next, eta)
        if prev is not None:
            gap = max(gap, _sup_gap(fs, prev[0]), _sup_gap(fi, prev[1]), _sup_gap(fr, prev[2]))
        else:
            gap = math.inf
        gaps.append(gap)
        omegas.append(omega)
        prev = (fs, fi, fr)
        eta = eta_next
        if gap < tol:
            converged = True
            break
        if len(gaps) >= 2 and gaps[-1] > gaps[-2]:
            rises += 1
            if rises >= 2 and omega > MIN_RELAXATION:
                omega = max(0.5 * omega, MIN_RELAXATION)
                rises = 0
        else:
            rises = 0
    if not converged:
        raise NoConvergence(f"no convergence in {max_iter} iterations "
                            f"(last gap {gaps[-1]:.3e})", gaps)

    # final state pass with the converged co-state
    fs, fi, fr, fe, fraw = _forward(params, eta, h, nsub, ndays)
    eta = _pad(eta, len(fs))
    raw = 1.0 + params.beta * eta * fi / params.c
    if np.any(raw < -EXPOSURE_SLACK) or np.any(raw > 1.0 + EXPOSURE_SLACK):
        k = int(np.argmax(np.maximum(-raw, raw - 1.0)))
        raise ExposureOutOfRange(f"unclamped exposure {raw[k]:.6g} at t={k * h:.4g}")

    t_fine = np.arange(len(fs)) * h
    p_fine = _kernels.probability_forward(fi, fe, params.beta, h)
    daily = slice(None, None, nsub)
    fine = FineGrid(t_fine, fs, fi, fr, fe)
    traj = Trajectory(t_fine[daily].copy(), fs[daily].copy(), fi[daily].copy(),
                      fr[daily].copy(), fe[daily].copy(), params, h, float(horizon),
                      len(fs) - 1 < ndays * nsub, fine, model="endogenous")
    costate = CostateTrajectory(traj.t, eta[daily].copy(), traj.eps, p_fine[daily].copy(),
                                converged, len(gaps), gaps[-1], tuple(gaps), tuple(omegas),
                                t_fine, eta)
    return traj, costate


def infection_probability(traj: Trajectory, tol: float = IDENTITY_TOL) -> np.ndarray:
    """Cumulative infection probability p(t) on the daily grid.

    Integrates dp/dt = eps*beta*I*(1-p) from p(0) = 0 on the fine grid.

    Raises
    ------
    IdentityViolation
        If 1 - p(t) differs from S(t)/S0 by more than ``tol`` anywhere.
    """
    fine = traj.fine
    if fine is None:
        raise ValueError("trajectory carries no fine grid")
    nsub = round(1.0 / traj.step)
    p = _kernels.probability_forward(fine.i, fine.eps, traj.params.beta, traj.step)
    err = np.abs((1.0 - p) - fine.s / traj.params.s0)
    if np.max(err) > tol:
        k = int(np.argmax(err))
        raise IdentityViolation(f"|1-p - S/S0| = {err[k]:.3e} at t={fine.t[k]:.4g}")
    return p[::nsub].copy()


def _eta_integral(fine: FineGrid, eta_fine: np.ndarray, params: ModelParams) -> np.ndarray:
    """Discounted premium integral for eta at every fine node."""
    t, s, eps = fine.t, fine.s, fine.eps
    prem0 = _premium0(params)
    premium = prem0 - 0.5 * params.c * (1.0 - eps) ** 2
    w = np.exp(-params.rho * t) * s * premium
    # summed from the end: the tail terms are far smaller than the total
    seg = 0.5 * (w[1:] + w[:-1]) * np.diff(t)
    rest = np.append(np.cumsum(seg[::-1])[::-1], 0.0)
    head = rest * np.exp(params.rho * t) / s
    tail = np.exp(-params.rho * (t[-1] - t)) * s[-1] / s * prem0 / params.rho
    return -(head + tail)


def eta_integral_check(traj: Trajectory, costate: CostateTrajectory,
                       times=None, samples: int = 10) -> float:
    """Largest relative gap between the ODE co-state and its integral form.

    The integral runs by trapezoid on the fine grid up to the last node; the
    tail beyond it assumes eps = 1 and S = S(T), which closes analytically.
    ``times`` defaults to ``samples`` evenly spaced fine nodes over [0, T].
    """
    fine = traj.fine
    if fine is None or costate.eta_fine is None:
        raise ValueError("fine grids are required")
    quad = _eta_integral(fine, costate.eta_fine, traj.params)
    if times is None:
        idx = np.linspace(0, len(fine.t) - 1, samples).round().astype(int)
    else:
        idx = np.searchsorted(fine.t, np.asarray(times, dtype=float) - 1e-9)
        idx = np.clip(idx, 0, len(fine.t) - 1)
    eta = costate.eta_fine[idx]
    return float(np.max(np.abs(quad[idx] - eta) / np.abs(eta)))


def fixed_point_residual(traj: Trajectory, costate: CostateTrajectory) -> float:
    """Sup change in eta after one more forward and backward pass."""
    p = traj.params
    h = traj.step
    nsub = round(1.0 / h)
    ndays = max(1, int(math.floor(traj.horizon + 1e-9)))
    bounds = eta_bounds(p)
    _, fi, _, fe, _ = _forward(p, costate.eta_fine, h, nsub, ndays)
    eta_new = _backward(p, fi, fe, h, bounds.lo)
    return _sup_gap(eta_new, costate.eta_fine)


@dataclass(frozen=True, eq=False)
class SandwichReport:
    s: np.ndarray
    i_lo: np.ndarray
    i_endog: np.ndarray
    i_hi: np.ndarray
    peak_lo: float
    peak_endog: float
    peak_hi: float
    slack: float
    eta_lo: float
    eta_hi: float
    extra: dict = field(default_factory=dict)

    @property
    def max_violation(self) -> float:
        return float(max(np.max(self.i_lo - self.i_endog), np.max(self.i_endog - self.i_hi)))

    @property
    def paths_ordered(self) -> bool:
        return self.max_violation <= self.slack

    @property
    def peaks_ordered(self) -> bool:
        return (self.peak_lo <= self.peak_endog + self.slack
                and self.peak_endog <= self.peak_hi + self.slack)


def _constant_peak(params: ModelParams) -> float:
    """Peak prevalence of the constant-cost model; I0 when it does not take off."""
    if initial_growth(params) <= 0:
        return params.i0
    return peak_from_phase(params)[1]


def _endog_path(traj: Trajectory, s_grid: np.ndarray) -> np.ndarray:
    fine = traj.fine
    s, i = fine.s, fine.i
    # S decreases in time; np.interp needs increasing abscissae
    return np.interp(s_grid, s[::-1], i[::-1])


def sandwich_check(params: ModelParams, points: int = 400, slack: float = 1e-6,
                   solution: tuple[Trajectory, CostateTrajectory] | None = None,
                   **solve_kwargs) -> SandwichReport:
    """Compare the endogenous path with the constant-cost paths at the co-state bounds.

    I(S) of each model is evaluated on a shared grid over [S_inf(eta_lo), S0].

    Raises
    ------
    SandwichViolation
        If I_lo(S) <= I_endog(S) <= I_hi(S) fails beyond ``slack``.
    """
    bounds = eta_bounds(params)
    traj, _ = solution if solution is not None else solve_equilibrium(params, **solve_kwargs)
    p_lo = params.with_(eta=bounds.lo)
    p_hi = params.with_(eta=bounds.hi)
    s_grid = np.linspace(final_size(p_lo), params.s0, points)
    i_lo = np.array([path_infected(float(v), p_lo) for v in s_grid])
    i_hi = np.array([path_infected(float(v), p_hi) for v in s_grid])
    i_e = _endog_path(traj, s_grid)
    peak_e = detect_peak(traj).i_peak
    report = SandwichReport(s_grid, i_lo, i_e, i_hi, _constant_peak(p_lo), peak_e,
                            _constant_peak(p_hi), slack, bounds.lo, bounds.hi)
    if not report.paths_ordered:
        excess = np.maximum(i_lo - i_e, i_e - i_hi)
        k = int(np.argmax(excess))
        raise SandwichViolation(f"ordering fails by {excess[k]:.3e} at S={s_grid[k]:.8g}",
                                float(s_grid[k]))
    return report
