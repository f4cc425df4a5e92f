"""Deterministic SVG rendering of curves and geodesic frames."""

from __future__ import annotations

import numpy as np


def _polyline(points: np.ndarray, offset, scale: float, color: str) -> str:
    coords = " ".join(
        f"{offset[0] + scale * x:.3f},{offset[1] - scale * y:.3f}" for x, y in points
    )
    return (
        f'<polygon points="{coords}" fill="none" stroke="{color}" stroke-width="1.2"/>'
    )


def render_frames(
    frames: list[np.ndarray],
    annotation: str = "",
    cell: float = 120.0,
) -> str:
    """Frames laid out left to right, endpoints highlighted."""
    k = len(frames)
    width = cell * k
    height = cell + 24.0
    spans = [max(np.ptp(f[:, 0]), np.ptp(f[:, 1]), 1e-9) for f in frames]
    scale = 0.8 * cell / max(spans)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">'
    ]
    for i, f in enumerate(frames):
        centered = f - f.mean(axis=0)
        offset = (cell * (i + 0.5), cell * 0.5)
        color = "#1f5fbf" if i == 0 else ("#c03030" if i == k - 1 else "#777777")
        parts.append(_polyline(centered, offset, scale, color))
    if annotation:
        parts.append(
            f'<text x="8" y="{height - 8:.0f}" font-family="monospace" '
            f'font-size="12">{annotation}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
