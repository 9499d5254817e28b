"""SIR epidemics with equilibrium social distancing."""

from .constant_cost import detect_peak, integrate
from .endogenous import solve_equilibrium
from .params import ModelParams, baseline_params, validate

__all__ = ["ModelParams", "baseline_params", "validate", "integrate", "detect_peak",
           "solve_equilibrium"]
__version__ = "0.1.0"
