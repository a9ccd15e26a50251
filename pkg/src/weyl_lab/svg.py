"""Minimal line plots written straight to SVG (fixed 800x600 viewBox)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["line_plot"]

W, H = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 90, 30, 50, 70
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [float(e) for e in range(math.floor(lo), math.ceil(hi) + 1)]
    if hi == lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / 4))
    for mult in (1, 2, 5, 10):
        if (hi - lo) / (step * mult) <= 6:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    n = int((hi - start) / step + 1e-9)
    return [start + i * step for i in range(n + 1)]


def _label(v: float, log: bool) -> str:
    if log:
        return f"1e{int(v)}"
    return f"{v:.6g}"


def line_plot(series, title: str = "", xlabel: str = "", ylabel: str = "",
              logx: bool = False, logy: bool = False) -> str:
    """``series`` is a list of ``(label, xs, ys)``; nonpositive values are
    dropped on log axes."""
    clean = []
    for label, xs, ys in series:
        pts = [(float(x), float(y)) for x, y in zip(xs, ys)
               if math.isfinite(x) and math.isfinite(y)
               and (not logx or x > 0) and (not logy or y > 0)]
        tx = [(math.log10(x) if logx else x, math.log10(y) if logy else y) for x, y in pts]
        clean.append((label, tx))
    allp = [p for _, pts in clean for p in pts] or [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
    y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT)

    def sy(y):
        return H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="13">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2}" y="28" text-anchor="middle" font-size="16">{escape(title)}</text>',
           f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}" stroke="black"/>',
           f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}" stroke="black"/>']
    for t in _ticks(x0, x1, logx):
        if x0 <= t <= x1:
            out.append(f'<line x1="{_fmt(sx(t))}" y1="{H - BOTTOM}" x2="{_fmt(sx(t))}" y2="{H - BOTTOM + 5}" stroke="black"/>')
            out.append(f'<text x="{_fmt(sx(t))}" y="{H - BOTTOM + 20}" text-anchor="middle">{_label(t, logx)}</text>')
    for t in _ticks(y0, y1, logy):
        if y0 <= t <= y1:
            out.append(f'<line x1="{LEFT - 5}" y1="{_fmt(sy(t))}" x2="{LEFT}" y2="{_fmt(sy(t))}" stroke="black"/>')
            out.append(f'<text x="{LEFT - 8}" y="{_fmt(sy(t) + 4)}" text-anchor="end">{_label(t, logy)}</text>')
    out.append(f'<text x="{W / 2}" y="{H - 25}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{H / 2}" text-anchor="middle" transform="rotate(-90 20 {H / 2})">{escape(ylabel)}</text>')
    for i, (label, pts) in enumerate(clean):
        color = COLORS[i % len(COLORS)]
        if len(pts) > 1:
            path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{path}"/>')
        for x, y in pts:
            out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" fill="{color}"/>')
        ly = TOP + 10 + 18 * i
        out.append(f'<line x1="{W - 230}" y1="{ly}" x2="{W - 205}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - 200}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
