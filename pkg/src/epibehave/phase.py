"""
Phase-space analytics of the constant-cost model.

With exposure interior, the path (S, I) through (S0, I0) is known in closed
form in terms of x = S + I:

    1/S = exp(v(x)^2 - v(1)^2)/S0 + 2k * exp(v(x)^2) * int_{v(x)}^{v(1)} exp(-u^2) du

where k = beta*sqrt(-eta/(2*gamma*c)) and v(x) = k*(x + c/(beta*eta)). Since
x decreases monotonically in time, the path is a graph S(x) over
x in (S_inf, 1], and the peak, the final size and I(S) all reduce to
one-dimensional root finding in x.

The exponentials are never formed directly: v(x)^2 - v(1)^2 is evaluated as
(1-x)*(beta/gamma - k^2*(1+x)) and the Gaussian integral is carried in
erfcx-scaled form, so the baseline calibration (|v| ~ 30) is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf, erfc, erfcx

from .errors import BracketFailure, DomainError, NoPeak
from .onset import onset_beta_interval
from .params import ModelParams
from .standard_sir import log_bisect

SQRT_PI_2 = 0.5 * math.sqrt(math.pi)


@dataclass(frozen=True)
class PhasePoint:
    s: float
    i: float


def erf_integral(a: float, b: float) -> float:
    """Integral of exp(-v^2) from a to b (either order)."""
    if a > b:
        return -erf_integral(b, a)
    if a >= 0.0:
        return SQRT_PI_2 * (erfc(a) - erfc(b))
    if b <= 0.0:
        return SQRT_PI_2 * (erfc(-b) - erfc(-a))
    return SQRT_PI_2 * (erf(b) - erf(a))


def _scaled_integral(a: float, b: float, a2_minus_b2: float) -> float:
    """exp(a^2) * integral of exp(-u^2) over [a, b], for a <= b."""
    if a >= 0.0:
        return SQRT_PI_2 * (erfcx(a) - math.exp(a2_minus_b2) * erfcx(b))
    if b <= 0.0:
        return SQRT_PI_2 * (math.exp(a2_minus_b2) * erfcx(-b) - erfcx(-a))
    return SQRT_PI_2 * math.exp(a * a) * (erf(b) - erf(a))


def _require_behavior(params: ModelParams) -> None:
    if not params.eta < 0:
        raise DomainError("phase solution needs eta < 0")
    if not 1.0 + params.eta * params.beta * params.i0 / params.c > 0:
        raise DomainError("initial distancing is complete; the phase formula needs d(0) < 1")


def _scale(params: ModelParams) -> tuple[float, float]:
    kappa = params.beta * math.sqrt(-params.eta / (2.0 * params.gamma * params.c))
    shift = params.c / (params.beta * params.eta)
    return kappa, shift


def inverse_path_s(x: float, params: ModelParams) -> float:
    """1/S on the solution path at S + I = x (no domain checks)."""
    kappa, shift = _scale(params)
    delta = (1.0 - x) * (params.beta / params.gamma - kappa * kappa * (1.0 + x))
    v_x = kappa * (x + shift)
    v_1 = kappa * (1.0 + shift)
    return math.exp(delta) / params.s0 + 2.0 * kappa * _scaled_integral(v_x, v_1, delta)


def path_s(x: float, params: ModelParams) -> float:
    """Susceptible share on the path where S + I = x."""
    _require_behavior(params)
    return 1.0 / inverse_path_s(x, params)


def phase_residual(point: PhasePoint, params: ModelParams) -> float:
    """Relative gap (S_path - S)/S between the path and ``point`` at equal S + I.

    Zero exactly when the point lies on the path through (S0, I0).
    """
    _require_behavior(params)
    if not 1.0 + params.eta * params.beta * point.i / params.c > 0:
        raise DomainError("exposure is clamped at zero at this point")
    return 1.0 / (point.s * inverse_path_s(point.s + point.i, params)) - 1.0


def quotient_slope(point: PhasePoint, params: ModelParams) -> float:
    """dI/dS = -1 + gamma / (beta * S * eps(I))."""
    eps = max(1.0 + params.beta * params.eta / params.c * point.i, 0.0)
    if eps == 0.0:
        raise ZeroDivisionError("exposure is zero: dI/dS is undefined")
    return -1.0 + params.gamma / (params.beta * point.s * eps)


def slope_param_derivatives(point: PhasePoint, params: ModelParams) -> tuple[float, float]:
    """Analytic partial derivatives of dI/dS in beta and in c at a fixed point."""
    b, g, c, eta = params.beta, params.gamma, params.c, params.eta
    s, i = point.s, point.i
    eps = 1.0 + b * eta * i / c
    if not eps > 0:
        raise DomainError("exposure must be interior")
    d_beta = -g / (b * b * s) * (1.0 + 2.0 * b * eta * i / c) / (eps * eps)
    d_c = g * eta * i / (c * c * s * eps * eps)
    return d_beta, d_c


def final_size(params: ModelParams, xtol: float = 1e-12) -> float:
    """Limiting susceptible share S_inf: the point where the path meets I = 0.

    Bisection on log(x) over [S0*exp(-beta/gamma)/2, min(gamma/beta, S0)].
    """
    _require_behavior(params)
    lo = math.log(params.s0) - params.beta / params.gamma - math.log(2.0)
    hi = math.log(min(params.gamma / params.beta - 1e-12, params.s0))

    def f(y: float) -> float:
        x = math.exp(y)
        return x * inverse_path_s(x, params) - 1.0

    return log_bisect(f, lo, hi, xtol)


def peak_from_phase(params: ModelParams) -> tuple[float, float]:
    """(S*, I*) where the path crosses beta*eps(I)*S = gamma.

    Raises
    ------
    NoPeak
        If beta lies outside the takeoff interval.
    """
    _require_behavior(params)
    interval = onset_beta_interval(params)
    if not interval.contains(params.beta):
        raise NoPeak(f"beta={params.beta} is outside the takeoff interval")
    bc = params.beta * params.eta / params.c

    def growth(x: float) -> float:
        s = 1.0 / inverse_path_s(x, params)
        return params.beta * s * (1.0 + bc * (x - s)) - params.gamma

    lo = final_size(params)
    hi = 1.0
    g_lo, g_hi = growth(lo), growth(hi)
    if not (g_lo < 0 < g_hi):
        raise BracketFailure("peak condition does not change sign on (S_inf, 1)",
                             lo=lo, hi=hi, f_lo=g_lo, f_hi=g_hi)
    x = brentq(growth, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=200)
    s = 1.0 / inverse_path_s(x, params)
    return s, x - s


def standard_path_infected(s, params: ModelParams):
    """I(S) on the no-behavior path: 1 - S + (gamma/beta) * log(S/S0)."""
    s = np.asarray(s, dtype=float)
    out = 1.0 - s + params.gamma / params.beta * np.log(s / params.s0)
    return float(out) if out.ndim == 0 else out


def path_infected(s: float, params: ModelParams) -> float:
    """Infected share on the path through (S0, I0) when susceptibles equal ``s``.

    Falls back to the closed-form standard path when eta = 0.
    """
    if params.eta == 0:
        return standard_path_infected(s, params)
    _require_behavior(params)
    if s == params.s0:
        return params.i0
    s_inf = final_size(params)
    if not s_inf <= s <= params.s0:
        raise DomainError(f"S={s} is outside the path's range [{s_inf}, {params.s0}]")
    if s == s_inf:
        return 0.0
    x = brentq(lambda x: 1.0 / inverse_path_s(x, params) - s, s_inf, 1.0,
               xtol=1e-16, rtol=1e-15, maxiter=200)
    return x - s


@dataclass(frozen=True, eq=False)
class DominanceReport:
    s: np.ndarray
    i_a: np.ndarray
    i_b: np.ndarray
    max_excess: float
    slack: float

    @property
    def a_below_b(self) -> bool:
        """True when I_a(S) <= I_b(S) + slack at every grid point."""
        return self.max_excess <= self.slack


def path_comparison(params_a: ModelParams, params_b: ModelParams, s_grid,
                    slack: float = 1e-12) -> DominanceReport:
    """Evaluate both paths on ``s_grid`` and report whether path a lies below b."""
    s = np.asarray(s_grid, dtype=float)
    i_a = np.array([path_infected(float(v), params_a) for v in s])
    i_b = np.array([path_infected(float(v), params_b) for v in s])
    return DominanceReport(s, i_a, i_b, float(np.max(i_a - i_b)), slack)
