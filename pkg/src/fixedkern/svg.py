"""Static SVG charts with no plotting dependency.

Each data series is drawn as exactly one element carrying a ``data-series``
attribute, which keeps the output easy to check structurally.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart", "stem_chart"]

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]

WIDTH, HEIGHT = 900, 480
LEFT, RIGHT, TOP, BOTTOM = 80, 170, 50, 60


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.6g}"


class _Canvas:
    def __init__(self, title, xlim, ylim, x_label="", y_label=""):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y0, self.y1 = self.y0 - 1.0, self.y1 + 1.0
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="18" '
            f'font-family="sans-serif">{escape(title)}</text>',
        ]
        self._axes(x_label, y_label)
        self.legend = 0

    def px(self, x):
        return LEFT + (np.asarray(x, dtype=float) - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)

    def py(self, y):
        return HEIGHT - BOTTOM - (np.asarray(y, dtype=float) - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)

    def _axes(self, x_label, y_label):
        right, bottom = WIDTH - RIGHT, HEIGHT - BOTTOM
        for v in _ticks(self.y0, self.y1):
            y = float(self.py(v))
            self.parts.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{right}" y2="{y:.2f}" stroke="#e0e0e0"/>')
            self.parts.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11" '
                              f'font-family="sans-serif">{_fmt(v)}</text>')
        for v in _ticks(self.x0, self.x1):
            x = float(self.px(v))
            self.parts.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" stroke="#000"/>')
            self.parts.append(f'<text x="{x:.2f}" y="{bottom + 18}" text-anchor="middle" font-size="11" '
                              f'font-family="sans-serif">{_fmt(v)}</text>')
        self.parts.append(f'<line x1="{LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000"/>')
        self.parts.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}" stroke="#000"/>')
        if x_label:
            self.parts.append(f'<text x="{(LEFT + right) / 2:.1f}" y="{HEIGHT - 18}" text-anchor="middle" '
                              f'font-size="13" font-family="sans-serif">{escape(x_label)}</text>')
        if y_label:
            cy = (TOP + bottom) / 2
            self.parts.append(f'<text x="20" y="{cy:.1f}" text-anchor="middle" font-size="13" '
                              f'font-family="sans-serif" transform="rotate(-90 20 {cy:.1f})">{escape(y_label)}</text>')

    def add_legend(self, name, color, dash=""):
        y = TOP + 14 + 20 * self.legend
        x = WIDTH - RIGHT + 14
        self.legend += 1
        self.parts.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>')
        self.parts.append(f'<text x="{x + 28}" y="{y + 4}" font-size="12" font-family="sans-serif">{escape(name)}</text>')

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.parts + ["</svg>"]) + "\n", encoding="utf-8")
        return path


def _limits(arrays, pad=0.05):
    vals = np.concatenate([np.asarray(a, dtype=float)[np.isfinite(a)] for a in arrays])
    lo, hi = (float(vals.min()), float(vals.max())) if vals.size else (0.0, 1.0)
    span = hi - lo or 1.0
    return lo - pad * span, hi + pad * span


def line_chart(path, title: str, x, series: Sequence[tuple[str, Sequence[float]]],
               x_label: str = "", y_label: str = "", hlines: Sequence[float] = ()) -> Path:
    """One polyline per named series over a shared x axis; nan values break nothing, they are dropped."""
    x = np.asarray(x, dtype=float)
    canvas = _Canvas(title, (float(x.min()), float(x.max())),
                     _limits([np.asarray(y, dtype=float) for _, y in series] + [np.asarray(hlines, dtype=float)]),
                     x_label, y_label)
    for v in hlines:
        y = float(canvas.py(v))
        canvas.parts.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{WIDTH - RIGHT}" y2="{y:.2f}" '
                            'stroke="#555" stroke-dasharray="4 3"/>')
    for i, (name, y) in enumerate(series):
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(y)
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(canvas.px(x[ok]), canvas.py(y[ok])))
        dash = ' stroke-dasharray="6 4"' if i else ""
        canvas.parts.append(f'<polyline data-series="{escape(name)}" fill="none" stroke="{color}" '
                            f'stroke-width="1.6"{dash} points="{pts}"/>')
        canvas.add_legend(name, color, dash)
    return canvas.save(path)


def stem_chart(path, title: str, values: Sequence[float], band: float | None = None,
               name: str = "acf", x_label: str = "lag", y_label: str = "") -> Path:
    """Stems at lags 1..L drawn as a single path, with optional ±band reference lines."""
    v = np.asarray(values, dtype=float)
    lags = np.arange(1, v.size + 1)
    lo, hi = _limits([v, np.array([0.0]) if band is None else np.array([-band, band, 0.0])])
    canvas = _Canvas(title, (0.0, float(v.size + 1)), (min(lo, -0.1), max(hi, 0.1)), x_label, y_label)
    zero = float(canvas.py(0.0))
    canvas.parts.append(f'<line x1="{LEFT}" y1="{zero:.2f}" x2="{WIDTH - RIGHT}" y2="{zero:.2f}" stroke="#000"/>')
    if band is not None:
        for b in (band, -band):
            y = float(canvas.py(b))
            canvas.parts.append(f'<line class="band" x1="{LEFT}" y1="{y:.2f}" x2="{WIDTH - RIGHT}" '
                                f'y2="{y:.2f}" stroke="#1f77b4" stroke-dasharray="5 4"/>')
    d = " ".join(f"M{a:.2f},{zero:.2f} L{a:.2f},{b:.2f}" for a, b in zip(canvas.px(lags), canvas.py(v)))
    canvas.parts.append(f'<path data-series="{escape(name)}" d="{d}" stroke="{COLORS[0]}" stroke-width="2" fill="none"/>')
    canvas.add_legend(name, COLORS[0])
    return canvas.save(path)
