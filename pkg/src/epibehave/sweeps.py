"""
Comparative statics over one parameter at a time.

Rows come from the implicit phase solution, so a 200-point grid costs well
under a second. Failures are captured per row and the sweep continues.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constant_cost import initial_growth
from .params import ModelParams
from .phase import final_size, peak_from_phase
from .standard_sir import standard_final_size, standard_peak

SWEEP_PARAMS = ("beta", "c", "eta", "i0")
OUTCOMES = ("peak", "final_size")


@dataclass(frozen=True)
class SweepRow:
    value: float
    i_peak: float = math.nan
    s_peak: float = math.nan
    s_inf: float = math.nan
    took_off: bool = False
    s_inf_standard: float = math.nan
    herd_threshold: float = math.nan
    error: str = ""


@dataclass(frozen=True)
class SweepTable:
    param: str
    rows: tuple[SweepRow, ...]
    outcomes: tuple[str, ...] = field(default=OUTCOMES)

    def __post_init__(self) -> None:
        vals = [r.value for r in self.rows]
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep values must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return self.column("value")

    def argmax_peak(self) -> float:
        """Grid value with the largest peak prevalence."""
        return float(self.values[int(np.nanargmax(self.column("i_peak")))])


def log_grid(lo: float, hi: float, points: int = 200) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def _row(params: ModelParams, name: str, value: float, outcomes: tuple[str, ...]) -> SweepRow:
    p = params.with_(**{name: value})
    took_off = initial_growth(p) > 0
    out: dict = {"value": value, "took_off": took_off,
                 "herd_threshold": p.gamma / p.beta}
    try:
        if "peak" in outcomes:
            if not took_off:
                out["i_peak"], out["s_peak"] = p.i0, p.s0
            elif p.eta == 0:
                out["i_peak"] = standard_peak(p)
                out["s_peak"] = p.gamma / p.beta
            else:
                out["s_peak"], out["i_peak"] = peak_from_phase(p)
        if "final_size" in outcomes:
            out["s_inf_standard"] = standard_final_size(p)
            out["s_inf"] = out["s_inf_standard"] if p.eta == 0 else final_size(p)
    except Exception as exc:  # per-row capture; the sweep carries on
        out["error"] = f"{type(exc).__name__}: {exc}"
    return SweepRow(**out)


def sweep(params: ModelParams, name: str, values, outcomes=OUTCOMES,
          workers: int = 1) -> SweepTable:
    """Evaluate ``outcomes`` for each value of parameter ``name``.

    Rows are returned in grid order whatever the completion order.
    """
    if name not in SWEEP_PARAMS:
        raise ValueError(f"cannot sweep {name!r}; choose from {SWEEP_PARAMS}")
    outcomes = tuple(outcomes)
    unknown = set(outcomes) - set(OUTCOMES)
    if unknown:
        raise ValueError(f"unknown outcomes {sorted(unknown)}")
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise ValueError("a sweep needs at least two grid values")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _row(params, name, v, outcomes), vals))
    else:
        rows = [_row(params, name, v, outcomes) for v in vals]
    return SweepTable(name, tuple(rows), outcomes)


def peak_sweep(params: ModelParams, name: str, values, workers: int = 1) -> SweepTable:
    return sweep(params, name, values, ("peak",), workers)


def final_size_sweep(params: ModelParams, name: str, values, workers: int = 1) -> SweepTable:
    return sweep(params, name, values, ("final_size",), workers)


def monotone_segments(y) -> tuple[int, int]:
    """Lengths of the leading strictly increasing run and the trailing
    strictly decreasing run of ``y``, counted in grid points."""
    y = np.asarray(y, dtype=float)
    d = np.diff(y)
    lead = 1
    for v in d:
        if v > 0:
            lead += 1
        else:
            break
    trail = 1
    for v in d[::-1]:
        if v < 0:
            trail += 1
        else:
            break
    return lead, trail
