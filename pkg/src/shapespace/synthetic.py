"""Synthetic closed-curve generators for tests and benchmarks."""

from __future__ import annotations

import math

import numpy as np

from .contour import RawContour


def circle_polygon(m: int = 400, radius: float = 1.0, center=(0.0, 0.0), cid: str = "circle") -> RawContour:
    t = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    pts = np.column_stack((center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)))
    return RawContour(points=pts, id=cid)


def ellipse_polygon(
    m: int = 400,
    a: float = 4.0,
    b: float = 1.0,
    rotation: float = 0.0,
    center=(0.0, 0.0),
    cid: str = "ellipse",
) -> RawContour:
    t = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    x = a * np.cos(t)
    y = b * np.sin(t)
    c, s = math.cos(rotation), math.sin(rotation)
    pts = np.column_stack((center[0] + c * x - s * y, center[1] + s * x + c * y))
    return RawContour(points=pts, id=cid)


def square_polygon(m: int = 400, side: float = 1.0, cid: str = "square") -> RawContour:
    per_side = max(1, m // 4)
    u = np.linspace(0.0, side, per_side, endpoint=False)
    z = np.zeros_like(u)
    pts = np.concatenate(
        [
            np.column_stack((u, z)),
            np.column_stack((np.full_like(u, side), u)),
            np.column_stack((side - u, np.full_like(u, side))),
            np.column_stack((z, side - u)),
        ]
    )
    return RawContour(points=pts, id=cid)


def star_shaped(
    rng: np.random.Generator,
    m: int = 400,
    harmonics: int = 5,
    amplitude: float = 0.12,
    aspect: float = 1.0,
    cid: str = "random",
) -> RawContour:
    """Random smooth star-shaped curve: radial Fourier perturbation of a
    (possibly stretched) circle.  Always simple for small amplitudes."""
    t = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    r = np.ones_like(t)
    for k in range(2, 2 + harmonics):
        a_k = rng.uniform(-amplitude, amplitude) / k
        phi = rng.uniform(0.0, 2.0 * math.pi)
        r += a_k * np.cos(k * t + phi)
    pts = np.column_stack((aspect * r * np.cos(t), r * np.sin(t)))
    return RawContour(points=pts, id=cid)


def with_radial_noise(c: RawContour, rng: np.random.Generator, level: float = 0.02) -> RawContour:
    """Low-frequency radial noise at `level` relative to the mean radius."""
    pts = c.points - c.points.mean(axis=0)
    radius = np.linalg.norm(pts, axis=1)
    mean_r = radius.mean()
    t = np.arctan2(pts[:, 1], pts[:, 0])
    noise = np.zeros_like(t)
    for k in range(1, 7):
        noise += rng.normal(0.0, level / math.sqrt(6.0)) * np.cos(k * t + rng.uniform(0, 2 * math.pi))
    scale = 1.0 + noise * mean_r / np.maximum(radius, 1e-12)
    return RawContour(points=pts * scale[:, None] + c.points.mean(axis=0), id=c.id, label=c.label)


def _labeled(c: RawContour, label: str) -> RawContour:
    return RawContour(points=c.points, id=c.id, label=label)


def labeled_corpus(
    rng: np.random.Generator,
    per_class: int = 30,
    m: int = 400,
    noise: float = 0.02,
) -> list[RawContour]:
    out = []
    for i in range(per_class):
        out.append(_labeled(with_radial_noise(circle_polygon(m, cid=f"circle-{i}"), rng, noise), "Normal"))
    for i in range(per_class):
        out.append(
            _labeled(
                with_radial_noise(ellipse_polygon(m, rotation=rng.uniform(0, math.pi), cid=f"ellipse-{i}"), rng, noise),
                "Sickle",
            )
        )
    for i in range(per_class):
        out.append(
            _labeled(with_radial_noise(square_polygon(m, cid=f"square-{i}"), rng, noise), "OtherDeformation")
        )
    return out
