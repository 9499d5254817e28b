"""
Static line charts as self-contained SVG text.

Output depends only on the input numbers and labels, so the same data
always gives byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptySeries

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=55)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


@dataclass(frozen=True, eq=False)
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    dashed: bool = False

    @classmethod
    def of(cls, x, y, label: str = "", dashed: bool = False) -> "Series":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError("x and y differ in shape")
        keep = np.isfinite(x) & np.isfinite(y)
        return cls(x[keep], y[keep], label, dashed)


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _num(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.4g}"


def _span(values: list[np.ndarray]) -> tuple[float, float]:
    lo = min(float(np.min(v)) for v in values)
    hi = max(float(np.max(v)) for v in values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def render(series: list[Series], *, title: str = "", xlabel: str = "", ylabel: str = "",
           hline: float | None = None, hline_label: str = "") -> str:
    """Line chart of ``series``; a series with a single point is drawn as a marker.

    ``hline`` adds a dashed horizontal reference line.

    Raises
    ------
    EmptySeries
        If there is no series or any series has no finite points.
    """
    if not series or any(len(s.x) == 0 for s in series):
        raise EmptySeries("nothing to plot")
    ys = [s.y for s in series] + ([np.array([hline])] if hline is not None else [])
    x0, x1 = _span([s.x for s in series])
    y0, y1 = _span(ys)
    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - left - MARGIN["right"]
    ph = HEIGHT - top - MARGIN["bottom"]

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" '
                   f'font-size="14">{escape(title)}</text>')
    for v in nice_ticks(x0, x1):
        x = px(v)
        out.append(f'<line x1="{_num(x)}" y1="{top + ph}" x2="{_num(x)}" y2="{top + ph + 5}" '
                   'stroke="black"/>')
        out.append(f'<text x="{_num(x)}" y="{top + ph + 18}" text-anchor="middle">{_label(v)}</text>')
    for v in nice_ticks(y0, y1):
        y = py(v)
        out.append(f'<line x1="{left - 5}" y1="{_num(y)}" x2="{left}" y2="{_num(y)}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_num(y + 4)}" text-anchor="end">{_label(v)}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    if hline is not None:
        y = _num(py(hline))
        out.append(f'<line x1="{left}" y1="{y}" x2="{left + pw}" y2="{y}" stroke="gray" '
                   f'stroke-dasharray="6 4"/>')
        if hline_label:
            out.append(f'<text x="{left + pw - 4}" y="{_num(py(hline) - 5)}" text-anchor="end" '
                       f'fill="gray">{escape(hline_label)}</text>')
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        if len(s.x) == 1:
            out.append(f'<circle cx="{_num(px(s.x[0]))}" cy="{_num(py(s.y[0]))}" r="4" fill="{color}"/>')
            continue
        pts = " ".join(f"{_num(px(a))},{_num(py(b))}" for a, b in zip(s.x, s.y))
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
    labelled = [(k, s) for k, s in enumerate(series) if s.label]
    for row, (k, s) in enumerate(labelled):
        y = top + 16 + 16 * row
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<line x1="{left + 10}" y1="{y - 4}" x2="{left + 30}" y2="{y - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + 36}" y="{y}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trajectory_svg(traj, title: str = "") -> str:
    return render([Series.of(traj.t, traj.s, "S"), Series.of(traj.t, traj.i, "I"),
                   Series.of(traj.t, traj.r, "R")], title=title, xlabel="days", ylabel="share")


def phase_svg(paths: list[tuple[np.ndarray, np.ndarray, str]], title: str = "") -> str:
    return render([Series.of(s, i, label) for s, i, label in paths],
                  title=title, xlabel="S", ylabel="I")


def sweep_svg(table, column: str, title: str = "", reference: str | None = None) -> str:
    """Sweep column against the swept value; ``reference`` names a column drawn dashed."""
    series = [Series.of(table.values, table.column(column), column)]
    if reference:
        series.append(Series.of(table.values, table.column(reference), reference, dashed=True))
    return render(series, title=title, xlabel=table.param, ylabel=column)
