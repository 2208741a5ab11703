"""Hand-rolled SVG scatter plots of layouts.

The view box fits the layout bounding box with a 5% margin; vertices are
circles with radius 0.8% of the view width, colored by label when labels
are given; edges are optional thin lines. Output is a deterministic
string.
"""
from __future__ import annotations

import numpy as np

from .stress import as_layout

__all__ = ["layout_svg"]

_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def layout_svg(
    x,
    edges=None,
    labels=None,
    title: str | None = None,
    subtitle: str | None = None,
    draw_edges: bool = True,
    size: int = 640,
) -> str:
    """Render a 1-D or 2-D layout (higher dims use the first two axes)."""
    x = as_layout(x)
    pts = x[:, :2] if x.shape[1] >= 2 else np.column_stack([x[:, 0], np.zeros(len(x))])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    margin = 0.05 * span.max()
    lo -= margin
    width = float(span.max() + 2 * margin)
    scale = size / width

    def sx(v):
        return (v - lo[0]) * scale

    def sy(v):
        # flip so larger coordinates render upward
        return size - (v - lo[1]) * scale

    out = []
    h_px = int(size + (0.12 * size if (title or subtitle) else 0))
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{h_px}" '
        f'viewBox="0 0 {size} {h_px}">'
    )
    out.append(f'<rect width="{size}" height="{h_px}" fill="white"/>')
    y_text = 0
    if title:
        y_text += int(0.05 * size)
        out.append(
            f'<text x="{size // 2}" y="{y_text}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="{int(0.035 * size)}">{title}</text>'
        )
    if subtitle:
        y_text += int(0.045 * size)
        out.append(
            f'<text x="{size // 2}" y="{y_text}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="{int(0.028 * size)}" fill="#555">{subtitle}</text>'
        )
    y_off = y_text + (int(0.02 * size) if y_text else 0)

    if draw_edges and edges:
        out.append(f'<g stroke="#999" stroke-width="{0.0015 * size:.3f}" stroke-opacity="0.6">')
        for u, v in sorted(edges):
            out.append(
                f'<line x1="{sx(pts[u, 0]):.3f}" y1="{sy(pts[u, 1]) + y_off:.3f}" '
                f'x2="{sx(pts[v, 0]):.3f}" y2="{sy(pts[v, 1]) + y_off:.3f}"/>'
            )
        out.append("</g>")

    radius = 0.008 * size
    out.append("<g>")
    for i, (px, py) in enumerate(pts):
        color = _PALETTE[labels[i] % len(_PALETTE)] if labels is not None else _PALETTE[0]
        out.append(
            f'<circle cx="{sx(px):.3f}" cy="{sy(py) + y_off:.3f}" r="{radius:.3f}" '
            f'fill="{color}" fill-opacity="0.9"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
