"""Minimal static SVG charts: line plots and labelled cell rasters."""

from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=30, bottom=55)

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

PHASE_COLORS = {
    "I1": "#08519c",
    "II1": "#6baed6",
    "II0": "#f7f7f7",
    "II2": "#fc9272",
    "I2": "#a50f15",
}


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _tick_label(value: float) -> str:
    if value != 0 and (abs(value) >= 1e4 or abs(value) < 1e-3):
        return f"{value:.1e}"
    return f"{value:.6g}"


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x0, self.x1 = self.x0 - 0.5, self.x1 + 0.5
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y1 + 0.5
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x: float) -> float:
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y: float) -> float:
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _axes(frame: _Frame, title: str, xlabel: str, ylabel: str) -> list[str]:
    out = [
        f'<rect x="{frame.left}" y="{frame.top}" width="{frame.right - frame.left}" '
        f'height="{frame.bottom - frame.top}" fill="none" stroke="black"/>',
        f'<text x="{(frame.left + frame.right) / 2}" y="{MARGIN["top"] - 10}" '
        f'text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text class="xlabel" x="{(frame.left + frame.right) / 2}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
        f'<text class="ylabel" x="16" y="{(frame.top + frame.bottom) / 2}" text-anchor="middle" '
        f'font-size="13" transform="rotate(-90 16 {(frame.top + frame.bottom) / 2})">'
        f'{escape(ylabel)}</text>',
    ]
    for t in nice_ticks(frame.x0, frame.x1):
        x = _fmt(frame.px(t))
        out.append(f'<line x1="{x}" y1="{frame.bottom}" x2="{x}" y2="{frame.bottom + 5}" '
                   f'stroke="black"/>')
        out.append(f'<text class="xtick" x="{x}" y="{frame.bottom + 18}" text-anchor="middle" '
                   f'font-size="11">{_tick_label(t)}</text>')
    for t in nice_ticks(frame.y0, frame.y1):
        y = _fmt(frame.py(t))
        out.append(f'<line x1="{frame.left - 5}" y1="{y}" x2="{frame.left}" y2="{y}" '
                   f'stroke="black"/>')
        out.append(f'<text class="ytick" x="{frame.left - 8}" y="{y}" text-anchor="end" '
                   f'dominant-baseline="middle" font-size="11">{_tick_label(t)}</text>')
    return out


def _legend(entries: Sequence[tuple[str, str, str]]) -> list[str]:
    """``entries`` are (label, colour, 'line' | 'box')."""
    x = WIDTH - MARGIN["right"] + 15
    out = ['<g class="legend">']
    for k, (label, colour, kind) in enumerate(entries):
        y = MARGIN["top"] + 10 + 20 * k
        if kind == "line":
            out.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" stroke="{colour}" '
                       f'stroke-width="2"/>')
        else:
            out.append(f'<rect x="{x}" y="{y - 7}" width="22" height="14" fill="{colour}" '
                       f'stroke="black" stroke-width="0.5"/>')
        out.append(f'<text x="{x + 28}" y="{y}" dominant-baseline="middle" font-size="12">'
                   f'{escape(label)}</text>')
    out.append("</g>")
    return out


def _document(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">')
    return "\n".join(['<?xml version="1.0" encoding="UTF-8"?>', head,
                      f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
                      *body, "</svg>"]) + "\n"


def _decimate(xs: Sequence[float], ys: Sequence[float], limit: int = 4000):
    n = len(xs)
    if n <= limit:
        return list(xs), list(ys)
    stride = math.ceil(n / limit)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    return [xs[i] for i in idx], [ys[i] for i in idx]


def line_chart(series: Mapping[str, tuple[Sequence[float], Sequence[float]]], *,
               title: str = "", xlabel: str = "", ylabel: str = "",
               markers: bool = False) -> str:
    """One polyline per named series."""
    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [y for _, ys in series.values() for y in ys]
    frame = _Frame((min(xs_all), max(xs_all)), (min(ys_all), max(ys_all)))
    pad = 0.05 * (frame.y1 - frame.y0)
    frame = _Frame((frame.x0, frame.x1), (frame.y0 - pad, frame.y1 + pad))
    body = _axes(frame, title, xlabel, ylabel)
    entries = []
    for k, (name, (xs, ys)) in enumerate(series.items()):
        colour = PALETTE[k % len(PALETTE)]
        xs, ys = _decimate(list(xs), list(ys))
        pts = " ".join(f"{_fmt(frame.px(x))},{_fmt(frame.py(y))}" for x, y in zip(xs, ys))
        body.append(f'<polyline class="series" fill="none" stroke="{colour}" '
                    f'stroke-width="1.5" points="{pts}"/>')
        if markers:
            body.extend(f'<circle cx="{_fmt(frame.px(x))}" cy="{_fmt(frame.py(y))}" r="2" '
                        f'fill="{colour}"/>' for x, y in zip(xs, ys))
        entries.append((name, colour, "line"))
    body.extend(_legend(entries))
    return _document(body)


def phase_raster(x_values: Sequence[float], y_values: Sequence[float],
                 kinds: Sequence[Sequence[str]], *, boundary: Sequence[tuple[float, float]] = (),
                 title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Cells ``kinds[i][j]`` at (x_values[i], y_values[j]) plus an optional polyline."""
    def edges(v):
        v = list(v)
        if len(v) == 1:
            return [v[0] - 0.5, v[0] + 0.5]
        mids = [(a + b) / 2 for a, b in zip(v[:-1], v[1:])]
        return [v[0] - (mids[0] - v[0])] + mids + [v[-1] + (v[-1] - mids[-1])]

    xe, ye = edges(x_values), edges(y_values)
    frame = _Frame((xe[0], xe[-1]), (ye[0], ye[-1]))
    body = ['<g class="cells">']
    for i in range(len(x_values)):
        for j in range(len(y_values)):
            x, x2 = frame.px(xe[i]), frame.px(xe[i + 1])
            y, y2 = frame.py(ye[j + 1]), frame.py(ye[j])
            kind = kinds[i][j]
            body.append(f'<rect class="cell" data-kind="{kind}" x="{_fmt(x)}" y="{_fmt(y)}" '
                        f'width="{_fmt(x2 - x)}" height="{_fmt(y2 - y)}" '
                        f'fill="{PHASE_COLORS.get(kind, "#999999")}"/>')
    body.append("</g>")
    body.extend(_axes(frame, title, xlabel, ylabel))
    entries = [(k, c, "box") for k, c in PHASE_COLORS.items()]
    if boundary:
        pts = " ".join(f"{_fmt(frame.px(x))},{_fmt(frame.py(y))}" for x, y in boundary)
        body.append(f'<polyline class="boundary" fill="none" stroke="black" stroke-width="2" '
                    f'stroke-dasharray="6,4" points="{pts}"/>')
        entries.append(("II0 line", "black", "line"))
    body.extend(_legend(entries))
    return _document(body)
