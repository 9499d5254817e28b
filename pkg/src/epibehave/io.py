"""CSV and JSON emission. Floats are written with 12 significant digits."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TRAJECTORY_HEADER = ("t", "S", "I", "R", "eps", "Rt_b")
FRONTIER_HEADER = ("beta", "neg_eta_frontier")
SWEEP_HEADER = ("param", "value", "i_peak", "s_peak", "s_inf", "took_off")
EQUILIBRIUM_HEADER = ("t", "S", "I", "R", "eps", "eta", "p")
CONTACT_HEADER = ("I", "g_quadratic", "g_capasso")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    v = float(x)
    if math.isnan(v):
        return "nan"
    return f"{v:.12g}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def columns_text(header: Sequence[str], cols: Sequence[Sequence]) -> str:
    lengths = {len(c) for c in cols}
    if len(lengths) != 1:
        raise ValueError("columns differ in length")
    return csv_text(header, zip(*cols))


def trajectory_csv(traj) -> str:
    return columns_text(TRAJECTORY_HEADER, (traj.t, traj.s, traj.i, traj.r, traj.eps, traj.rt_b))


def equilibrium_csv(traj, costate) -> str:
    return columns_text(EQUILIBRIUM_HEADER,
                        (traj.t, traj.s, traj.i, traj.r, costate.eps, costate.eta, costate.p))


def frontier_csv(frontier) -> str:
    return columns_text(FRONTIER_HEADER, (frontier.beta, frontier.neg_eta))


def sweep_csv(table) -> str:
    rows = [(table.param, r.value, r.i_peak, r.s_peak, r.s_inf, r.took_off) for r in table.rows]
    return csv_text(SWEEP_HEADER, rows)


def contact_csv(columns: dict) -> str:
    return columns_text(CONTACT_HEADER, [columns[k] for k in CONTACT_HEADER])


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Header and numeric body of a CSV written by this module."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) if v not in ("",) else math.nan for v in r] for r in body])
    return header, data.reshape(len(body), len(header))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
