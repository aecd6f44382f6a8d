"""CSV tables and deterministic SVG line plots."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .errors import InvalidInputError

UNITS_NOTE = ("units: hbar = 1 dimensionless convention unless hbar is set; "
              "SI-valued inputs are treated as plain numbers")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)
    comments: list = field(default_factory=list)

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.comments:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows([fmt(v) for v in row] for row in self.rows)
        return buf.getvalue()


@dataclass
class PlotSpec:
    x: str
    y: str
    group: str | None = None
    log_y: bool = False
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
_W, _H = 640, 420
_L, _R, _T, _B = 70, 20, 40, 55


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def emit_svg(table: Table, spec: PlotSpec) -> str:
    """One polyline per group value; output depends only on the inputs."""
    if len(table.rows) < 2:
        raise InvalidInputError("need at least two rows to plot")
    xs = [float(v) for v in table.column(spec.x)]
    ys = [float(v) for v in table.column(spec.y)]
    groups = table.column(spec.group) if spec.group else [""] * len(xs)
    if spec.log_y:
        floor = 1e-300
        ys = [math.log10(max(y, floor)) for y in ys]
    finite = [y for y in ys if math.isfinite(y)]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(finite), max(finite)
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5

    def px(x):
        return _L + (x - x0) / (x1 - x0) * (_W - _L - _R)

    def py(y):
        return _H - _B - (y - y0) / (y1 - y0) * (_H - _T - _B)

    order = []
    series = {}
    for x, y, g in zip(xs, ys, groups):
        if g not in series:
            order.append(g)
            series[g] = []
        series[g].append((x, y))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(spec.title)}</text>',
           f'<line x1="{_L}" y1="{_H - _B}" x2="{_W - _R}" y2="{_H - _B}" stroke="black"/>',
           f'<line x1="{_L}" y1="{_T}" x2="{_L}" y2="{_H - _B}" stroke="black"/>']
    for tx in _ticks(x0, x1):
        out.append(f'<text x="{px(tx):.2f}" y="{_H - _B + 16}" text-anchor="middle" '
                   f'font-size="11">{tx:.4g}</text>')
    for ty in _ticks(y0, y1):
        label = f"1e{ty:.3g}" if spec.log_y else f"{ty:.4g}"
        out.append(f'<text x="{_L - 6}" y="{py(ty) + 4:.2f}" text-anchor="end" '
                   f'font-size="11">{label}</text>')
    out.append(f'<text x="{_W / 2:.1f}" y="{_H - 12}" text-anchor="middle" '
               f'font-size="13">{escape(spec.xlabel or spec.x)}</text>')
    out.append(f'<text x="16" y="{_H / 2:.1f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 16 {_H / 2:.1f})">{escape(spec.ylabel or spec.y)}</text>')
    for i, g in enumerate(order):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in series[g] if math.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        if spec.group:
            ly = _T + 14 + 16 * i
            legend = escape(f"{spec.group}={fmt(g)}")
            out.append(f'<text x="{_W - _R - 8}" y="{ly}" text-anchor="end" font-size="11" '
                       f'fill="{color}">{legend}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
