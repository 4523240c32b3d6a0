"""Minimal standalone SVG line charts.

No plotting library: the output must be byte-identical for identical input,
which rules out anything that embeds versions, timestamps or dash-array
randomness.  Axes, ticks, labels, legend, polylines; nothing else.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

_WIDTH, _HEIGHT = 720.0, 480.0
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64.0, 24.0, 24.0, 48.0
_PALETTE = ("#1f6f8b", "#d1495b", "#66a182", "#edae49", "#574ae2", "#8d5a97")
_N_TICKS = 5


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    return f"{v:.6g}"


def _ticks(lo: float, hi: float) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (_N_TICKS - 1) for k in range(_N_TICKS)]


def emit_plot(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    path: str,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    """Write a line chart of (label, x, y) series to ``path`` as SVG.

    Raises ValueError for an empty series list or length-mismatched data;
    filesystem errors propagate.  Returns the path written.
    """
    if len(series) == 0:
        raise ValueError("no series to plot")
    cleaned = []
    for label, xs, ys in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.size == 0 or xs.size != ys.size:
            raise ValueError(f"series {label!r} must have matching nonempty x and y")
        cleaned.append((str(label), xs, ys))

    x_lo = min(float(xs.min()) for _, xs, _ in cleaned)
    x_hi = max(float(xs.max()) for _, xs, _ in cleaned)
    y_lo = min(float(ys.min()) for _, _, ys in cleaned)
    y_hi = max(float(ys.max()) for _, _, ys in cleaned)
    if not all(map(math.isfinite, (x_lo, x_hi, y_lo, y_hi))):
        raise ValueError("series contain non-finite values")
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(_WIDTH)}" '
        f'height="{_fmt(_HEIGHT)}" viewBox="0 0 {_fmt(_WIDTH)} {_fmt(_HEIGHT)}">',
        f'<rect width="{_fmt(_WIDTH)}" height="{_fmt(_HEIGHT)}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{_fmt(_WIDTH / 2)}" y="16" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )

    axis_y = _MARGIN_T + plot_h
    out.append(
        f'<line x1="{_fmt(_MARGIN_L)}" y1="{_fmt(axis_y)}" x2="{_fmt(_MARGIN_L + plot_w)}" '
        f'y2="{_fmt(axis_y)}" stroke="#000000" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{_fmt(_MARGIN_L)}" y1="{_fmt(_MARGIN_T)}" x2="{_fmt(_MARGIN_L)}" '
        f'y2="{_fmt(axis_y)}" stroke="#000000" stroke-width="1"/>'
    )
    for tx in _ticks(x_lo, x_hi):
        x = px(tx)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(axis_y)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(axis_y + 5)}" stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{_fmt(axis_y + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(tx)}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        y = py(ty)
        out.append(
            f'<line x1="{_fmt(_MARGIN_L - 5)}" y1="{_fmt(y)}" x2="{_fmt(_MARGIN_L)}" '
            f'y2="{_fmt(y)}" stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(_MARGIN_L - 8)}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(ty)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{_fmt(_MARGIN_L + plot_w / 2)}" y="{_fmt(_HEIGHT - 10)}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">{xlabel}</text>'
        )
    if ylabel:
        cx, cy = 16.0, _MARGIN_T + plot_h / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{ylabel}</text>'
        )

    for k, (label, xs, ys) in enumerate(cleaned):
        color = _PALETTE[k % len(_PALETTE)]
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        ly = _MARGIN_T + 14.0 + 16.0 * k
        lx = _MARGIN_L + plot_w - 150.0
        out.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 4)}" x2="{_fmt(lx + 22)}" '
            f'y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{_fmt(lx + 28)}" y="{_fmt(ly)}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )

    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
    return path
