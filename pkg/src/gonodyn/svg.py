"""Bare-bones SVG rendering for trajectories and basin maps."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = 60
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"]
OUTCOME_COLORS = {
    "Origin": "#4c9be8",
    "Point": "#222222",
    "Blowup": "#e8604c",
    "Undecided": "#cccccc",
}


def _header(width=WIDTH, height=HEIGHT):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
            f'<rect width="{width}" height="{height}" fill="white"/>']


def _axes(x0, x1, y0, y1, xlabel, ylabel):
    left, right = MARGIN, WIDTH - MARGIN / 2
    top, bottom = MARGIN / 2, HEIGHT - MARGIN
    out = [f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>']
    for frac in (0.0, 0.5, 1.0):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        px = left + frac * (right - left)
        py = bottom - frac * (bottom - top)
        out.append(f'<text x="{px:.1f}" y="{bottom + 16}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{py + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{(left + right) / 2}" y="{HEIGHT - 16}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{(top + bottom) / 2}" transform="rotate(-90 16 {(top + bottom) / 2})" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    return out, (left, right, top, bottom)


def line_plot(series: dict, log: bool = False, xlabel: str = "n", ylabel: str = "value") -> str:
    """Polyline per named series over a shared integer x axis.

    With ``log=True`` values are drawn as ``log10(|value|)``; zeros are skipped.
    """
    def tr(v):
        if not log:
            return v
        return math.log10(abs(v)) if v != 0 else None

    drawn = {name: [tr(v) for v in values] for name, values in series.items()}
    finite = [v for vals in drawn.values() for v in vals if v is not None and math.isfinite(v)]
    n = max((len(v) for v in drawn.values()), default=1)
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    parts = _header()
    axes, (left, right, top, bottom) = _axes(0, max(n - 1, 1), lo, hi, xlabel,
                                             f"log10|{ylabel}|" if log else ylabel)
    parts += axes
    for k, (name, vals) in enumerate(drawn.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = []
        for i, v in enumerate(vals):
            if v is None or not math.isfinite(v):
                continue
            px = left + (right - left) * i / max(n - 1, 1)
            py = bottom - (bottom - top) * (v - lo) / (hi - lo)
            pts.append(f"{px:.2f},{py:.2f}")
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(pts)}"/>')
        parts.append(f'<text x="{right - 40}" y="{top + 14 * (k + 1)}" fill="{color}">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heat_map(cells, xs, ys, xlabel: str, ylabel: str) -> str:
    """Colour grid cells by outcome. ``cells[i][j]`` belongs to ``(xs[i], ys[j])``."""
    parts = _header()
    x0, x1 = (xs[0], xs[-1]) if len(xs) > 1 else (xs[0] - 0.5, xs[0] + 0.5)
    y0, y1 = (ys[0], ys[-1]) if len(ys) > 1 else (ys[0] - 0.5, ys[0] + 0.5)
    axes, (left, right, top, bottom) = _axes(x0, x1, y0, y1, xlabel, ylabel)
    cw = (right - left) / len(xs)
    ch = (bottom - top) / len(ys)
    for i in range(len(xs)):
        for j in range(len(ys)):
            color = OUTCOME_COLORS.get(cells[i][j], "#ffffff")
            parts.append(f'<rect x="{left + i * cw:.2f}" y="{bottom - (j + 1) * ch:.2f}" '
                         f'width="{cw + 0.05:.2f}" height="{ch + 0.05:.2f}" fill="{color}"/>')
    parts += axes
    for k, (name, color) in enumerate(OUTCOME_COLORS.items()):
        parts.append(f'<rect x="{right - 70}" y="{top + 14 * k}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{right - 56}" y="{top + 14 * k + 9}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
