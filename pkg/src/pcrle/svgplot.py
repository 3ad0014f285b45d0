"""Minimal hand-written SVG line charts for sweep diagnostics.

No plotting dependency: these charts are debugging artifacts, not the
product.  Log-log axes, one polyline per series, and an optional
reference line drawn in slope only with its intercept anchored to the
first series.
"""

from __future__ import annotations

import math

_COLORS = ("#c0392b", "#27ae60", "#2980b9", "#8e44ad", "#d68910", "#16a085")
_W, _H = 560, 420
_MARGIN = 60


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_chart_svg(
    series: dict[str, list[tuple[float, float]]],
    path,
    title: str = "",
    xlabel: str = "n",
    ylabel: str = "value",
    reference_slope: float | None = None,
    log_log: bool = True,
) -> None:
    """Write a line chart of the given (x, y) series to an SVG file."""
    pts_all = [(x, y) for pts in series.values() for x, y in pts if y > 0 or not log_log]
    if not pts_all:
        raise ValueError("nothing to plot")

    def tx(v):
        return math.log10(v) if log_log else v

    xs = [tx(x) for x, _ in pts_all]
    ys = [tx(y) for _, y in pts_all]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    y_lo -= 0.05 * (y_hi - y_lo)
    y_hi += 0.05 * (y_hi - y_lo)

    def px(v):
        return _MARGIN + (tx(v) - x_lo) / (x_hi - x_lo) * (_W - 2 * _MARGIN)

    def py(v):
        return _H - _MARGIN - (tx(v) - y_lo) / (y_hi - y_lo) * (_H - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="black"/>',
        f'<text x="{_W / 2}" y="22" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_W / 2}" y="{_H - 14}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{_H / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_H / 2})">{ylabel}</text>',
    ]

    for t in _ticks(x_lo, x_hi):
        x = _MARGIN + (t - x_lo) / (x_hi - x_lo) * (_W - 2 * _MARGIN)
        label = f"{10 ** t:.3g}" if log_log else f"{t:.3g}"
        parts.append(f'<line x1="{x}" y1="{_H - _MARGIN}" x2="{x}" '
                     f'y2="{_H - _MARGIN + 5}" stroke="black"/>')
        parts.append(f'<text x="{x}" y="{_H - _MARGIN + 18}" text-anchor="middle" '
                     f'font-size="10">{label}</text>')
    for t in _ticks(y_lo, y_hi):
        y = _H - _MARGIN - (t - y_lo) / (y_hi - y_lo) * (_H - 2 * _MARGIN)
        label = f"{10 ** t:.3g}" if log_log else f"{t:.3g}"
        parts.append(f'<line x1="{_MARGIN - 5}" y1="{y}" x2="{_MARGIN}" y2="{y}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{_MARGIN - 8}" y="{y + 3}" text-anchor="end" '
                     f'font-size="10">{label}</text>')

    if reference_slope is not None and log_log:
        first = next(iter(series.values()))
        first = [(x, y) for x, y in first if y > 0]
        if first:
            # anchor the intercept to the first point of the first series
            x0, y0 = first[0]
            b = math.log10(y0) - reference_slope * math.log10(x0)
            xa, xb_ = 10**x_lo, 10**x_hi
            ya = 10 ** (reference_slope * math.log10(xa) + b)
            yb = 10 ** (reference_slope * math.log10(xb_) + b)
            parts.append(
                f'<line x1="{px(xa):.2f}" y1="{py(ya):.2f}" x2="{px(xb_):.2f}" '
                f'y2="{py(yb):.2f}" stroke="black" stroke-dasharray="6,4"/>'
            )

    for i, (name, pts) in enumerate(series.items()):
        pts = [(x, y) for x, y in pts if y > 0 or not log_log]
        if not pts:
            continue
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="1.8"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.6" '
                         f'fill="{color}"/>')
        parts.append(f'<text x="{_W - _MARGIN + 4}" y="{_MARGIN + 16 * i}" '
                     f'font-size="11" fill="{color}">{name}</text>')

    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
