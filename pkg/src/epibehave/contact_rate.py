"""
Force-of-infection functions g(I) implied by a distancing cost.

A susceptible who distances by d pays c(d) and meets infected at rate
beta*(1-d)*I. Equating marginal cost with the marginal benefit -eta*beta*I
gives d(I), hence the force of infection g(I) = beta*I*(1 - d(I)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .params import ModelParams

DEFAULT_POINTS = 1001
FD_STEP = 1e-8


@dataclass(frozen=True, eq=False)
class ForceOfInfection:
    """g on [0, 1] in closed form plus its tabulation on a uniform grid."""
    name: str
    func: Callable[[np.ndarray], np.ndarray]
    slope0: float
    grid: np.ndarray
    values: np.ndarray

    def __call__(self, i):
        return self.func(i)

    def fd_slope0(self, h: float = FD_STEP) -> float:
        """Forward finite-difference g'(0)."""
        return float((self.func(np.array([h]))[0] - self.func(np.array([0.0]))[0]) / h)

    def assumptions(self, grid=None) -> dict[str, bool]:
        """Check g(0) = 0, g'(0) > 0 and g(x) <= g'(0)*x on ``grid``."""
        x = self.grid if grid is None else np.asarray(grid, dtype=float)
        g = self.func(x)
        return {
            "g0_zero": float(self.func(np.array([0.0]))[0]) == 0.0,
            "slope_positive": self.fd_slope0() > 0,
            "below_tangent": bool(np.all(g <= self.slope0 * x * (1.0 + 1e-15))),
        }


def _grid(points: int) -> np.ndarray:
    if points < 2:
        raise ValueError("need at least two grid points")
    return np.linspace(0.0, 1.0, points)


def quadratic_g(i, params: ModelParams):
    """beta*I*max(1 + eta*beta*I/c, 0): the quadratic-cost force of infection."""
    x = np.asarray(i, dtype=float)
    out = params.beta * x * np.maximum(1.0 + params.eta * params.beta * x / params.c, 0.0)
    return float(out) if out.ndim == 0 else out


def recover_g_quadratic(params: ModelParams, points: int = DEFAULT_POINTS) -> ForceOfInfection:
    """g implied by the cost (c/2)*d^2, for which d(I) = -eta*beta*I/c."""
    if params.eta > 0:
        raise DomainError("eta must be non-positive")
    grid = _grid(points)
    f = lambda x: quadratic_g(x, params)  # noqa: E731
    return ForceOfInfection("quadratic", f, params.beta, grid, f(grid))


def capasso_g(i, alpha: float, beta: float):
    """Saturating force of infection beta*I / (1 + I/alpha)."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    x = np.asarray(i, dtype=float)
    out = beta * x / (1.0 + x / alpha)
    return float(out) if out.ndim == 0 else out


def capasso_force(alpha: float, beta: float, points: int = DEFAULT_POINTS) -> ForceOfInfection:
    grid = _grid(points)
    f = lambda x: capasso_g(x, alpha, beta)  # noqa: E731
    return ForceOfInfection("capasso", f, beta, grid, f(grid))


def capasso_cost(d, alpha: float, eta: float, beta: float):
    """Distancing cost -eta*beta*alpha*((1-d) - log(1-d)); unbounded as d -> 1."""
    x = np.asarray(d, dtype=float)
    if np.any(x < 0) or np.any(x >= 1):
        raise DomainError("distancing must lie in [0, 1)")
    out = -eta * beta * alpha * ((1.0 - x) - np.log1p(-x))
    return float(out) if out.ndim == 0 else out


def capasso_marginal_cost(d, alpha: float, eta: float, beta: float):
    """c'(d) = -eta*beta*alpha * d/(1-d)."""
    x = np.asarray(d, dtype=float)
    if np.any(x < 0) or np.any(x >= 1):
        raise DomainError("distancing must lie in [0, 1)")
    out = -eta * beta * alpha * x / (1.0 - x)
    return float(out) if out.ndim == 0 else out


def foc_distancing(i: float, eta: float, beta: float,
                   marginal_cost: Callable[[float], float]) -> float:
    """Distancing d in [0, 1) solving c'(d) = -eta*beta*I.

    ``marginal_cost`` must be increasing with c'(0) = 0.
    """
    target = -eta * beta * i
    if target <= 0.0:
        return 0.0
    hi = 0.5
    while marginal_cost(hi) < target:
        hi = 0.5 * (1.0 + hi)
        if hi >= 1.0 - 1e-16:
            raise DomainError("marginal cost stays below the benefit on [0, 1)")
    return brentq(lambda d: marginal_cost(d) - target, 0.0, hi, xtol=1e-16, rtol=1e-15)


def capasso_foc_g(i_grid, alpha: float, eta: float, beta: float) -> np.ndarray:
    """Force of infection beta*I*(1-d) with d from the Capasso cost's first-order condition."""
    mc = lambda d: capasso_marginal_cost(d, alpha, eta, beta)  # noqa: E731
    x = np.asarray(i_grid, dtype=float)
    d = np.array([foc_distancing(float(v), eta, beta, mc) for v in x])
    return beta * x * (1.0 - d)


def default_alpha(params: ModelParams) -> float:
    """Saturation level matching the quadratic g to second order at I = 0."""
    if not params.eta < 0:
        raise DomainError("default alpha needs eta < 0")
    return params.c / (-params.eta * params.beta)


def contact_rate_table(params: ModelParams, alpha: float | None = None,
                       points: int = DEFAULT_POINTS) -> dict[str, np.ndarray]:
    """Columns I, g_quadratic, g_capasso on a uniform grid over [0, 1]."""
    a = default_alpha(params) if alpha is None else alpha
    grid = _grid(points)
    return {"I": grid, "g_quadratic": quadratic_g(grid, params),
            "g_capasso": capasso_g(grid, a, params.beta)}
