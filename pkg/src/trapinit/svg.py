"""Minimal SVG line charts: linear or log axes, several series, horizontal reference lines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

WIDTH, HEIGHT = 860, 520
LEFT, RIGHT, TOP, BOTTOM = 90, 30, 50, 70


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]


@dataclass
class Chart:
    title: str
    x_label: str
    y_label: str
    log_x: bool = False
    log_y: bool = False
    series: list = field(default_factory=list)
    hlines: list = field(default_factory=list)  # (y, label)

    def add(self, label, x, y) -> "Chart":
        self.series.append(Series(label, x, y))
        return self

    def hline(self, y, label) -> "Chart":
        self.hlines.append((float(y), label))
        return self

    def render(self) -> str:
        return render(self)

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.render())
        return path


def _ticks(lo, hi, log):
    if log:
        e0, e1 = math.floor(lo), math.ceil(hi)
        step = max(1, int(math.ceil((e1 - e0) / 8)))
        return [float(e) for e in range(e0, e1 + 1, step) if lo - 1e-9 <= e <= hi + 1e-9]
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / 6
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * span:
        out.append(t)
        t += step
    return out


def _label(v, log) -> str:
    if log:
        return f"1e{int(round(v))}"
    return f"{v:.4g}"


def render(chart: Chart) -> str:
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    xs, ys = [], []
    prepared = []
    for s in chart.series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if chart.log_x:
            ok &= x > 0
        if chart.log_y:
            ok &= y > 0
        x, y = x[ok], y[ok]
        if chart.log_x:
            x = np.log10(x)
        if chart.log_y:
            y = np.log10(y)
        prepared.append((s.label, x, y))
        xs.append(x)
        ys.append(y)
    hl = []
    for yv, label in chart.hlines:
        if chart.log_y:
            if yv <= 0:
                continue
            yv = math.log10(yv)
        hl.append((yv, label))
        ys.append(np.array([yv]))
    allx = np.concatenate(xs) if xs else np.array([0.0, 1.0])
    ally = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    if allx.size == 0 or ally.size == 0:
        raise ValueError("nothing to plot")
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return LEFT + (v - x0) / (x1 - x0) * pw

    def py(v):
        return TOP + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="16">{_escape(chart.title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for t in _ticks(x0, x1, chart.log_x):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{TOP + ph}" x2="{X:.2f}" y2="{TOP + ph + 5}" stroke="#333"/>')
        out.append(f'<text x="{X:.2f}" y="{TOP + ph + 19}" text-anchor="middle">{_label(t, chart.log_x)}</text>')
    for t in _ticks(y0, y1, chart.log_y):
        Y = py(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{Y:.2f}" x2="{LEFT}" y2="{Y:.2f}" stroke="#333"/>')
        out.append(f'<line x1="{LEFT}" y1="{Y:.2f}" x2="{LEFT + pw}" y2="{Y:.2f}" stroke="#eee"/>')
        out.append(f'<text x="{LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{_label(t, chart.log_y)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 20}" text-anchor="middle">{_escape(chart.x_label)}</text>')
    out.append(
        f'<text x="20" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {TOP + ph / 2:.1f})">{_escape(chart.y_label)}</text>'
    )
    for yv, label in hl:
        Y = py(yv)
        out.append(
            f'<line x1="{LEFT}" y1="{Y:.2f}" x2="{LEFT + pw}" y2="{Y:.2f}" '
            f'stroke="#555" stroke-dasharray="6 4"/>'
        )
        out.append(f'<text x="{LEFT + pw - 4}" y="{Y - 5:.2f}" text-anchor="end" fill="#555">{_escape(label)}</text>')
    for i, (label, x, y) in enumerate(prepared):
        color = COLORS[i % len(COLORS)]
        if x.size:
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 16 + 16 * i
        out.append(f'<line x1="{LEFT + 12}" y1="{ly - 4}" x2="{LEFT + 36}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + 42}" y="{ly}">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
