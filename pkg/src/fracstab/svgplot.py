"""Minimal self-contained SVG line plots.

Renders one or more named series against a shared time axis into an
SVG string with no external dependencies.  The time axis is
logarithmic by default because decay diagnostics live on decades; the
value axis stays linear.  Non-finite samples split the polyline rather
than corrupting it.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["render"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64.0, 16.0, 34.0, 44.0


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    if v == 0.0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:g}"


def render(
    t,
    series: dict,
    *,
    log_x: bool = True,
    width: int = 900,
    height: int = 480,
    title: str = "",
    y_label: str = "",
) -> str:
    """Plot each named array in `series` against `t`; returns SVG text."""
    t = np.asarray(t, dtype=float)
    named = {name: np.asarray(y, dtype=float) for name, y in series.items()}
    if any(len(y) != len(t) for y in named.values()):
        raise ValueError("every series must match the time grid length")

    if log_x:
        keep = t > 0.0
        t_plot = np.log10(t[keep])
        named = {n: y[keep] for n, y in named.items()}
    else:
        t_plot = t
    if len(t_plot) == 0:
        raise ValueError("nothing to plot after removing nonpositive times")

    x_lo, x_hi = float(t_plot.min()), float(t_plot.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    finite_vals = np.concatenate(
        [y[np.isfinite(y)] for y in named.values() if np.isfinite(y).any()]
        or [np.zeros(1)]
    )
    y_lo, y_hi = float(finite_vals.min()), float(finite_vals.max())
    if y_hi == y_lo:
        y_hi, y_lo = y_hi + 1.0, y_lo - 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = width - MARGIN_L - MARGIN_R
    plot_h = height - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
            f'font-size="14">{escape(title)}</text>'
        )

    if log_x:
        x_ticks = list(range(math.ceil(x_lo - 1e-9), math.floor(x_hi + 1e-9) + 1))
        x_tick_labels = [f"1e{k}" if k not in (0, 1, 2, 3) else _fmt(10.0**k) for k in x_ticks]
    else:
        x_ticks = _nice_ticks(x_lo, x_hi)
        x_tick_labels = [_fmt(v) for v in x_ticks]
    for xv, lab in zip(x_ticks, x_tick_labels):
        gx = px(xv)
        parts.append(
            f'<line x1="{gx:.1f}" y1="{MARGIN_T:.1f}" x2="{gx:.1f}" '
            f'y2="{MARGIN_T + plot_h:.1f}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{gx:.1f}" y="{MARGIN_T + plot_h + 16:.1f}" '
            f'text-anchor="middle">{escape(lab)}</text>'
        )
    for yv in _nice_ticks(y_lo, y_hi):
        gy = py(yv)
        parts.append(
            f'<line x1="{MARGIN_L:.1f}" y1="{gy:.1f}" '
            f'x2="{MARGIN_L + plot_w:.1f}" y2="{gy:.1f}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 6:.1f}" y="{gy + 4:.1f}" '
            f'text-anchor="end">{escape(_fmt(yv))}</text>'
        )
    parts.append(
        f'<rect x="{MARGIN_L:.1f}" y="{MARGIN_T:.1f}" width="{plot_w:.1f}" '
        f'height="{plot_h:.1f}" fill="none" stroke="#444444"/>'
    )

    for idx, (name, y) in enumerate(named.items()):
        color = PALETTE[idx % len(PALETTE)]
        run: list[str] = []
        for xv, yv in zip(t_plot, y):
            if math.isfinite(yv):
                run.append(f"{px(xv):.2f},{py(yv):.2f}")
            elif run:
                parts.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                    f'points="{" ".join(run)}"/>'
                )
                run = []
        if run:
            parts.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{" ".join(run)}"/>'
            )
        ly = MARGIN_T + 14 + 16 * idx
        parts.append(
            f'<line x1="{MARGIN_L + plot_w - 110:.1f}" y1="{ly - 4:.1f}" '
            f'x2="{MARGIN_L + plot_w - 90:.1f}" y2="{ly - 4:.1f}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L + plot_w - 84:.1f}" y="{ly:.1f}">{escape(name)}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 14 {MARGIN_T + plot_h / 2:.1f})">{escape(y_label)}</text>'
        )
    parts.append(f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{height - 8:.1f}" '
                 f'text-anchor="middle">t</text>')
    parts.append("</svg>")
    return "\n".join(parts)
