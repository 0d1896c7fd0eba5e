"""Minimal, deterministic SVG rendering of critical values and thimbles."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .mirror1d import Thimble

_SIZE = 480
_PAD = 30


def _frame(points: np.ndarray):
    """Affine map from the bounding box of ``points`` into the canvas."""
    pts = np.asarray(points, dtype=complex)
    lo_x, hi_x = pts.real.min(), pts.real.max()
    lo_y, hi_y = pts.imag.min(), pts.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    cx, cy = (lo_x + hi_x) / 2, (lo_y + hi_y) / 2
    k = (_SIZE - 2 * _PAD) / span

    def to_px(z: complex) -> tuple[float, float]:
        return (round(_SIZE / 2 + k * (z.real - cx), 3), round(_SIZE / 2 - k * (z.imag - cy), 3))

    return to_px


def _doc(body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
            f'viewBox="0 0 {_SIZE} {_SIZE}">')
    return "\n".join([head, f"<title>{title}</title>",
                      f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>', *body, "</svg>\n"])


def critical_value_svg(values: Sequence[complex], phi: float | None = None,
                       title: str = "critical values") -> str:
    """Constellation of critical values; optionally the admissible line at ``phi``.

    Each value is drawn as one ``<circle class="critical-value">``.
    """
    w = np.asarray(values, dtype=complex)
    to_px = _frame(np.concatenate([w, [0j]]))
    body = []
    if phi is not None:
        r = float(np.abs(w).max() or 1.0) * 1.2
        a, b = to_px(-r * complex(math.cos(phi), math.sin(phi))), to_px(r * complex(math.cos(phi), math.sin(phi)))
        body.append(f'<line class="admissible-line" x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" '
                    'stroke="#999" stroke-dasharray="4 3"/>')
    for i, z in enumerate(w):
        x, y = to_px(complex(z))
        body.append(f'<circle class="critical-value" cx="{x}" cy="{y}" r="4" fill="#c0392b"/>')
        body.append(f'<text x="{x + 6}" y="{y - 6}" font-size="11">{i}</text>')
    return _doc(body, title)


def thimble_svg(thimbles: Sequence[Thimble], points: Sequence[complex],
                title: str = "thimbles", clip: float = 20.0) -> str:
    """Thimble polylines in the x-plane, clipped to |x| <= clip * max|x_i|."""
    xs = np.asarray(points, dtype=complex)
    R = clip * max(1.0, float(np.abs(xs).max()))
    keep = [t.path[np.abs(t.path) <= R] for t in thimbles]
    allpts = np.concatenate([xs] + [k for k in keep if len(k)])
    to_px = _frame(allpts)
    body = []
    colours = ["#2471a3", "#229954", "#b9770e", "#7d3c98", "#a93226", "#138d75"]
    for n, pts in enumerate(keep):
        if len(pts) < 2:
            continue
        coords = " ".join(f"{x},{y}" for x, y in (to_px(complex(z)) for z in pts))
        body.append(f'<polyline class="thimble" fill="none" stroke="{colours[n % len(colours)]}" '
                    f'stroke-width="1.2" points="{coords}"/>')
    for z in xs:
        x, y = to_px(complex(z))
        body.append(f'<circle class="critical-point" cx="{x}" cy="{y}" r="3.5" fill="black"/>')
    return _doc(body, title)
