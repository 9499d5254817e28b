"""
Takeoff conditions: behavioral R0, the interval of transmission rates for
which the epidemic grows at t = 0, and the severity-transmissibility
frontier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoThreshold
from .params import ModelParams

DISCRIMINANT_TOL = 1e-14


def behavioral_r0(params: ModelParams) -> float:
    eps0 = max(1.0 + params.eta * params.beta * params.i0 / params.c, 0.0)
    return params.beta / params.gamma * params.s0 * min(eps0, 1.0)


def behavioral_r0_curve(params: ModelParams, betas) -> np.ndarray:
    b = np.asarray(betas, dtype=float)
    eps0 = np.clip(1.0 + params.eta * b * params.i0 / params.c, 0.0, 1.0)
    return b / params.gamma * params.s0 * eps0


@dataclass(frozen=True)
class OnsetInterval:
    beta_lo: float | None
    beta_hi: float | None
    i0_threshold: float
    tangent: bool = False

    @property
    def empty(self) -> bool:
        return self.beta_lo is None

    def contains(self, beta: float) -> bool:
        return not self.empty and self.beta_lo < beta < self.beta_hi

    def as_dict(self) -> dict:
        return {"beta_lo": self.beta_lo, "beta_hi": self.beta_hi,
                "i0_threshold": self.i0_threshold, "empty": self.empty,
                "tangent": self.tangent}


def i0_threshold(params: ModelParams) -> float:
    """Initial seed at or above which no transmission rate lets the epidemic grow."""
    return 1.0 / (1.0 - 4.0 * params.eta * params.gamma / params.c)


def onset_quadratic(beta: float, params: ModelParams) -> float:
    """beta*(1 + eta*I0*beta/c)*(1 - I0) - gamma; positive iff dI/dt(0) > 0."""
    return beta * (1.0 + params.eta * params.i0 / params.c * beta) * params.s0 - params.gamma


def onset_beta_interval(params: ModelParams) -> OnsetInterval:
    """Roots of the takeoff quadratic in beta, or an empty interval.

    The lower root uses the cancellation-free form 2g / (S0 (1 + sqrt(D)))
    and the upper root follows from the product of the roots.
    """
    if not params.eta < 0:
        raise ValueError("the takeoff interval needs eta < 0")
    threshold = i0_threshold(params)
    disc = 1.0 + 4.0 * params.eta * params.gamma * params.i0 / (params.c * params.s0)
    if disc < -DISCRIMINANT_TOL or params.i0 >= threshold:
        return OnsetInterval(None, None, threshold)
    if disc <= DISCRIMINANT_TOL:
        return OnsetInterval(None, None, threshold, tangent=True)
    root = math.sqrt(disc)
    beta_lo = 2.0 * params.gamma / (params.s0 * (1.0 + root))
    # beta_lo * beta_hi = -gamma*c / (eta*I0*S0)
    beta_hi = -params.gamma * params.c / (params.eta * params.i0 * params.s0 * beta_lo)
    return OnsetInterval(beta_lo, beta_hi, threshold)


@dataclass(frozen=True, eq=False)
class SeverityFrontier:
    beta: np.ndarray
    neg_eta: np.ndarray
    ceiling: float


def severity_frontier(params: ModelParams, beta_grid) -> SeverityFrontier:
    """Cost of infection -eta at which dI/dt(0) = 0, for each beta.

    Solves beta*(1 + eta*beta*I0/c)*S0 = gamma for -eta. Values are negative
    where beta*S0 <= gamma, meaning no non-negative cost lets it take off.
    ``ceiling`` is the cost above which no beta takes off.
    """
    b = np.asarray(beta_grid, dtype=float)
    if np.any(b <= 0):
        raise ValueError("beta grid must be positive")
    neg_eta = params.c / (b * params.i0) * (1.0 - params.gamma / (b * params.s0))
    ceiling = params.c / (4.0 * params.gamma) * params.s0 / params.i0
    return SeverityFrontier(b, neg_eta, ceiling)


def c_threshold(params: ModelParams) -> float:
    """Distancing cost above which the epidemic grows at t = 0.

    Solving the takeoff condition for c gives
    c = -eta * beta^2 * I0 * S0 / (beta*S0 - gamma).
    """
    excess = params.beta * params.s0 - params.gamma
    if not excess > 0:
        raise NoThreshold("beta*(1-I0) <= gamma: no distancing cost allows takeoff")
    return -params.eta * params.beta ** 2 * params.i0 * params.s0 / excess
