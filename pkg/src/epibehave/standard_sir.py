"""No-behavior SIR baseline with closed-form peak and final-size relations."""

from __future__ import annotations

import math

from .constant_cost import DEFAULT_HORIZON, DEFAULT_STEP, _run
from .errors import BracketFailure, NoTakeoff
from .params import ModelParams, Trajectory


def integrate_standard(params: ModelParams, horizon: float = DEFAULT_HORIZON,
                       step: float = DEFAULT_STEP, *, early_stop: bool = True,
                       keep_fine: bool = False) -> Trajectory:
    """RK4 integration with exposure pinned to one; ``params.eta`` is ignored."""
    return _run(params, horizon, step, False, early_stop, keep_fine)


def standard_peak(params: ModelParams) -> float:
    """Peak prevalence 1 - g/b + (g/b)*log(g/(b*S0)); needs b*S0 > g."""
    ratio = params.gamma / params.beta
    if not params.beta * params.s0 > params.gamma:
        raise NoTakeoff("beta*S0 <= gamma: the standard epidemic does not take off")
    return 1.0 - ratio + ratio * math.log(ratio / params.s0)


def final_size_residual(x: float, params: ModelParams) -> float:
    """1 - x - (g/b)*log(S0/x); zero at the limiting susceptible share."""
    return 1.0 - x - params.gamma / params.beta * math.log(params.s0 / x)


def standard_final_size(params: ModelParams, xtol: float = 1e-12) -> float:
    """Limiting susceptible share of the standard model.

    Bisection runs on log(x) so that roots far below 1e-16 (large beta/gamma)
    stay bracketed; the bracket starts at half the lower bound S0*exp(-beta/gamma).
    """
    ratio = params.gamma / params.beta
    lo = math.log(params.s0) - params.beta / params.gamma - math.log(2.0)
    hi = math.log(min(ratio - 1e-12, params.s0))
    return log_bisect(lambda y: final_size_residual(math.exp(y), params), lo, hi, xtol)


def log_bisect(f, lo: float, hi: float, xtol: float) -> float:
    """Root x = exp(y) of f(y) on [lo, hi] with f(lo) < 0 < f(hi).

    Stops when the bracket in x is narrower than ``xtol`` relative to x.
    """
    f_lo, f_hi = f(lo), f(hi)
    if not (f_lo < 0 < f_hi):
        raise BracketFailure("final-size residual does not change sign",
                             lo=math.exp(lo), hi=math.exp(hi), f_lo=f_lo, f_hi=f_hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        # hi - lo in log space is the relative width in x
        if hi - lo < xtol:
            break
    return 0.5 * (math.exp(lo) + math.exp(hi))
