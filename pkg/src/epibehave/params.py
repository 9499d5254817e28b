"""
Parameters, state containers and validation shared by every model.

Rates are per day. ``rho`` is the combined discount rate, i.e. pure time
preference plus the arrival rate of a cure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

PARAM_KEYS = ("beta", "gamma", "c", "eta", "rho", "pi_s", "pi_i", "pi_r", "i0")


@dataclass(frozen=True)
class ModelParams:
    beta: float
    gamma: float
    c: float
    eta: float
    rho: float
    pi_s: float
    pi_i: float
    pi_r: float
    i0: float

    @property
    def s0(self) -> float:
        return 1.0 - self.i0

    @property
    def eta_over_c(self) -> float:
        return self.eta / self.c

    def with_(self, **changes: float) -> "ModelParams":
        return replace(self, **{k: float(v) for k, v in changes.items()})

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def baseline_params() -> ModelParams:
    """COVID-19 calibration used for every numerical result (daily units)."""
    gamma = 1.0 / 7.0
    return ModelParams(
        beta=0.3 + gamma,
        gamma=gamma,
        c=2.0,
        eta=-2761.63,
        rho=(0.05 + 0.67) / 365.0,
        pi_s=0.0,
        pi_i=-399.96,
        pi_r=0.0,
        i0=0.95e-4,
    )


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __iter__(self) -> Iterator[str]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def v_infected_value(params: ModelParams) -> float:
    return (params.pi_i + params.gamma / params.rho * params.pi_r) / (params.rho + params.gamma)


def severity_margin(params: ModelParams) -> float:
    """pi_S - c/2 - rho*V_I; positive when full distancing beats certain infection."""
    return params.pi_s - params.c / 2.0 - params.rho * v_infected_value(params)


def validate(params: ModelParams, *, endogenous: bool = False) -> ValidationReport:
    """List every violated parameter invariant. An empty report means valid.

    With ``endogenous=True`` the severity assumption of the endogenous-cost
    model is checked as well.
    """
    out: list[str] = []
    for name in PARAM_KEYS:
        if not math.isfinite(getattr(params, name)):
            out.append(f"{name} must be finite")
    if out:
        return ValidationReport(tuple(out))
    for name in ("beta", "gamma", "c", "rho"):
        if not getattr(params, name) > 0:
            out.append(f"{name} must be positive")
    if params.eta > 0:
        out.append("eta must be non-positive")
    if not 0.0 < params.i0 < 1.0:
        out.append("i0 must lie in (0,1)")
    if not params.pi_s >= params.pi_r >= params.pi_i:
        out.append("flow payoffs must satisfy pi_s >= pi_r >= pi_i")
    if endogenous and not out and severity_margin(params) <= 0:
        out.append("severity assumption violated: need pi_s - c/2 > rho*V_I")
    return ValidationReport(tuple(out))


def params_from_mapping(data: Mapping[str, object], base: ModelParams | None = None) -> ModelParams:
    """Build parameters from a flat key-value mapping; missing keys keep ``base``.

    ``rho`` may be given directly or as the pair ``rho_tilde`` + ``lambda``.
    Unknown keys raise ``KeyError`` so typos do not pass silently.
    """
    base = base or baseline_params()
    allowed = set(PARAM_KEYS) | {"rho_tilde", "lambda"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise KeyError(f"unknown parameter keys: {', '.join(unknown)}")
    values = {k: float(data[k]) for k in PARAM_KEYS if k in data}  # type: ignore[arg-type]
    if "rho_tilde" in data or "lambda" in data:
        if "rho" in data:
            raise ValueError("give either rho or the pair rho_tilde/lambda, not both")
        if not ("rho_tilde" in data and "lambda" in data):
            raise ValueError("rho_tilde and lambda must be given together")
        values["rho"] = float(data["rho_tilde"]) + float(data["lambda"])  # type: ignore[arg-type]
    return replace(base, **values)


def load_params(path: str | Path, base: ModelParams | None = None) -> ModelParams:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("parameter file must hold a flat JSON object")
    return params_from_mapping(data, base)


@dataclass(frozen=True)
class EpidemicState:
    t: float
    s: float
    i: float
    r: float
    eps: float


@dataclass(frozen=True, eq=False)
class FineGrid:
    """Sub-daily integrator nodes, kept when downstream code needs them."""

    t: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray
    eps: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Daily samples of an integrated epidemic plus run metadata."""

    t: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray
    eps: np.ndarray
    params: ModelParams
    step: float
    horizon: float
    terminated_early: bool = False
    fine: FineGrid | None = field(default=None, repr=False)
    model: str = "constant"

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, k: int) -> EpidemicState:
        return EpidemicState(float(self.t[k]), float(self.s[k]), float(self.i[k]),
                             float(self.r[k]), float(self.eps[k]))

    def states(self) -> Iterator[EpidemicState]:
        for k in range(len(self.t)):
            yield self[k]

    @property
    def rt_b(self) -> np.ndarray:
        """Behavioral effective reproduction number at each output day."""
        p = self.params
        return p.beta / p.gamma * self.s * self.eps
