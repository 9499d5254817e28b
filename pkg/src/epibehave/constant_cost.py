"""
Equilibrium with a constant cost of infection.

Susceptibles choose exposure eps = max(1 + eta*beta*I/c, 0), which turns the
SIR system into an autonomous ODE in (S, I, R). It is integrated with
classic fixed-step RK4 and sampled once per day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConservationViolation, MultiplePeaks, NonFiniteState
from .params import EpidemicState, FineGrid, ModelParams, Trajectory

DEFAULT_STEP = 0.05
DEFAULT_HORIZON = 400 * 365
# early termination: I below this and daily drop in S below DS_STOP
I_STOP = 1e-12
DS_STOP = 1e-14


def exposure(i, params: ModelParams):
    """Equilibrium exposure for infected share ``i`` (scalar or array)."""
    raw = 1.0 + params.eta * params.beta * np.asarray(i, dtype=float) / params.c
    out = np.clip(raw, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def rhs(state, params: ModelParams) -> tuple[float, float, float]:
    """(dS/dt, dI/dt, dR/dt) at ``state``.

    ``state`` is an :class:`EpidemicState` or any ``(s, i, r)`` triple.
    """
    if isinstance(state, EpidemicState):
        s, i = state.s, state.i
    else:
        s, i = state[0], state[1]
    infections = params.beta * s * i * exposure(i, params)
    return -infections, infections - params.gamma * i, params.gamma * i


def substeps_per_day(step: float) -> int:
    if not step > 0:
        raise ValueError("step must be positive")
    n = round(1.0 / step)
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"step must divide one day evenly, got {step}")
    return n


def _run(params: ModelParams, horizon: float, step: float, behavior: bool,
         early_stop: bool, keep_fine: bool) -> Trajectory:
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    nsub = substeps_per_day(step)
    ndays = max(1, int(math.floor(horizon + 1e-9)))
    h = 1.0 / nsub
    k = params.eta * params.beta / params.c
    (t, s, i, r, e, done, stopped, status,
     fs, fi, fr, fe) = _kernels.sir_rk4(params.s0, params.i0, 0.0, params.beta, params.gamma,
                                        k, behavior, h, nsub, ndays, early_stop,
                                        I_STOP, DS_STOP, keep_fine)
    if status == _kernels.NON_FINITE:
        raise NonFiniteState(f"non-finite state at day {done}")
    if status == _kernels.CONSERVATION:
        raise ConservationViolation(
            f"|S+I+R-1| = {abs(s[-1] + i[-1] + r[-1] - 1):.3e} at day {done}")
    fine = None
    if keep_fine:
        fine = FineGrid(np.arange(len(fs)) * h, fs, fi, fr, fe)
    return Trajectory(t, s, i, r, e, params, h, float(horizon), bool(stopped), fine,
                      model="constant" if behavior else "standard")


def integrate(params: ModelParams, horizon: float = DEFAULT_HORIZON,
              step: float = DEFAULT_STEP, *, early_stop: bool = True,
              keep_fine: bool = False) -> Trajectory:
    """Integrate the behavioral SIR model from (S0, I0, 0).

    Parameters
    ----------
    horizon : float
        Days to simulate. The run stops earlier once I < 1e-12 and the daily
        drop in S is below 1e-14, unless ``early_stop`` is False.
    step : float
        RK4 step in days; must divide one day evenly.
    keep_fine : bool
        Also keep the states at every RK4 node in ``traj.fine``.

    Raises
    ------
    NonFiniteState, ConservationViolation
    """
    return _run(params, horizon, step, True, early_stop, keep_fine)


@dataclass(frozen=True)
class PeakInfo:
    t_peak: float
    s_peak: float
    i_peak: float
    took_off: bool


def initial_growth(params: ModelParams) -> float:
    """dI/dt at t = 0."""
    return rhs((params.s0, params.i0, 0.0), params)[1]


def _growth_series(traj: Trajectory) -> np.ndarray:
    p = traj.params
    return p.beta * traj.s * traj.i * traj.eps - p.gamma * traj.i


def _hermite_peak(h: float, y0: float, y1: float, d0: float, d1: float) -> tuple[float, float]:
    """Maximum of the cubic Hermite interpolant on [0, h] with d0 > 0 >= d1."""
    # y(u) = y0 + d0*u + a*u^2 + b*u^3
    a = (3.0 * (y1 - y0) / h - 2.0 * d0 - d1) / h
    b = (d0 + d1 - 2.0 * (y1 - y0) / h) / (h * h)
    if abs(b) < 1e-300:
        u = -d0 / (2.0 * a)
    else:
        disc = max(a * a - 3.0 * b * d0, 0.0)
        # root of d0 + 2a u + 3b u^2 without cancellation
        q = -(a + math.copysign(math.sqrt(disc), a))
        roots = [r for r in (q / (3.0 * b), d0 / q if q != 0 else math.inf) if 0.0 <= r <= h]
        u = roots[0] if roots else (0.0 if d1 >= 0 else h)
    return u, y0 + u * (d0 + u * (a + u * b))


def _local_fine(traj: Trajectory, day: int):
    """RK4 nodes over [day, day+1], from the stored fine grid or by re-running that day."""
    p = traj.params
    nsub = round(1.0 / traj.step)
    if traj.fine is not None:
        sl = slice(day * nsub, (day + 1) * nsub + 1)
        f = traj.fine
        return f.t[sl], f.s[sl], f.i[sl], f.eps[sl]
    k = p.eta * p.beta / p.c
    out = _kernels.sir_rk4(traj.s[day], traj.i[day], traj.r[day], p.beta, p.gamma, k,
                           traj.model != "standard", traj.step, nsub, 1, False,
                           I_STOP, DS_STOP, True)
    return traj.t[day] + np.arange(nsub + 1) * traj.step, out[8], out[9], out[11]


def detect_peak(traj: Trajectory) -> PeakInfo:
    """Locate the single interior maximum of I.

    The daily samples bracket the day on which dI/dt changes sign. Inside
    it the RK4 nodes are used, and a cubic Hermite fit through the two nodes
    around the sign change (with the exact derivatives) gives the peak.

    Raises
    ------
    MultiplePeaks
        If the sampled I has more than one strict local maximum.
    """
    p = traj.params
    growth = _growth_series(traj)
    if not growth[0] > 0:
        return PeakInfo(0.0, p.s0, p.i0, False)
    i = traj.i
    inner = np.flatnonzero((i[1:-1] > i[:-2]) & (i[1:-1] >= i[2:])) + 1
    if len(inner) > 1:
        raise MultiplePeaks(f"local maxima of I at days {traj.t[inner].tolist()}")
    down = np.flatnonzero(growth <= 0)
    if len(down) == 0 or traj.model == "endogenous" and traj.fine is None:
        k = int(np.argmax(i))
        return PeakInfo(float(traj.t[k]), float(traj.s[k]), float(i[k]), True)
    day = int(down[0]) - 1
    t, s, ii, e = _local_fine(traj, day)
    g = p.beta * s * ii * e - p.gamma * ii
    m = max(int(np.flatnonzero(g <= 0)[0]) - 1, 0) if np.any(g <= 0) else len(g) - 2
    h = t[m + 1] - t[m]
    u, i_peak = _hermite_peak(h, ii[m], ii[m + 1], g[m], g[m + 1])
    ds0 = -p.beta * s[m] * ii[m] * e[m]
    ds1 = -p.beta * s[m + 1] * ii[m + 1] * e[m + 1]
    # S on the same Hermite basis
    w = u / h
    h00, h10 = 2 * w**3 - 3 * w**2 + 1, w**3 - 2 * w**2 + w
    h01, h11 = -2 * w**3 + 3 * w**2, w**3 - w**2
    s_peak = h00 * s[m] + h10 * h * ds0 + h01 * s[m + 1] + h11 * h * ds1
    return PeakInfo(float(t[m] + u), float(s_peak), float(i_peak), True)


def growth_sign_changes(traj: Trajectory) -> int:
    """Number of sign changes of dI/dt along the daily samples."""
    g = np.sign(_growth_series(traj))
    g = g[g != 0]
    return int(np.count_nonzero(g[1:] != g[:-1]))


@dataclass(frozen=True, eq=False)
class ReproductionNumbers:
    r0: float
    r0_b: float
    t: np.ndarray
    rt_b: np.ndarray


def reproduction_numbers(traj: Trajectory) -> ReproductionNumbers:
    p = traj.params
    r0 = p.beta * p.s0 / p.gamma
    return ReproductionNumbers(r0, r0 * float(traj.eps[0]), traj.t.copy(), traj.rt_b)
