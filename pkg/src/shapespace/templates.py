"""Circle and ellipse reference shapes and template-distance features."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grassmann, srvf
from .contour import NormalizedCurve, RawContour, normalize


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class TemplateSet:
    circle: NormalizedCurve
    ellipse: NormalizedCurve
    aspect: float


@dataclass(frozen=True)
class FeatureVector:
    cell_id: str
    d_circle: float
    d_ellipse: float
    label: str | None = None


def _ellipse_polygon(a: float, b: float, m: int) -> np.ndarray:
    t = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    return np.column_stack((a * np.cos(t), b * np.sin(t)))


def make_templates(n: int = 295, aspect: float = 4.0) -> TemplateSet:
    """Canonical circle and axis-aligned ellipse at the working resolution.

    Templates run through the same normalization pipeline as cells so every
    convention (length, centering, start point) is shared.
    """
    if n < 3:
        raise TemplateError("n must be >= 3")
    if not aspect > 1.0:
        raise TemplateError("aspect ratio must be > 1")
    m = max(4 * n, 720)
    circle = normalize(RawContour(points=_ellipse_polygon(1.0, 1.0, m), id="template:circle"), n)
    ellipse = normalize(
        RawContour(points=_ellipse_polygon(aspect, 1.0, m), id="template:ellipse"), n
    )
    return TemplateSet(circle=circle, ellipse=ellipse, aspect=aspect)


def _template_distance(
    c: NormalizedCurve,
    t: NormalizedCurve,
    space: str,
    method: str,
    shift_step: int = 5,
    rotation_mode: str = "flip_only",
) -> float:
    if space == "S1":
        if method == "fixed":
            d, _ = grassmann.grassmann_distance(grassmann.to_grassmann(c), grassmann.to_grassmann(t))
        elif method == "reparam":
            d, _ = grassmann.grassmann_distance_minshift(c, t, step=shift_step)
        else:
            raise TemplateError(f"unknown method {method!r}")
        return d
    if space == "S2":
        if method == "fixed":
            return srvf.srvf_distance_fixed(c, t, mode=rotation_mode)
        if method == "reparam":
            d, _ = srvf.srvf_distance_elastic(
                c, t, shift_step=shift_step, rotation_mode=rotation_mode
            )
            return d
        raise TemplateError(f"unknown method {method!r}")
    raise TemplateError(f"unknown space {space!r}")


def template_features(
    c: NormalizedCurve,
    t: TemplateSet,
    space: str = "S2",
    method: str = "fixed",
    shift_step: int = 5,
    rotation_mode: str = "flip_only",
) -> FeatureVector:
    """Distances from a cell to both templates in the selected space/method."""
    if c.n != t.circle.n:
        raise TemplateError(f"grid mismatch: cell n={c.n}, templates n={t.circle.n}")
    d_circle = _template_distance(c, t.circle, space, method, shift_step, rotation_mode)
    d_ellipse = _template_distance(c, t.ellipse, space, method, shift_step, rotation_mode)
    return FeatureVector(cell_id=c.id, d_circle=d_circle, d_ellipse=d_ellipse, label=c.label)


def features_table(
    curves: list[NormalizedCurve],
    t: TemplateSet,
    space: str = "S2",
    method: str = "fixed",
    shift_step: int = 5,
    rotation_mode: str = "flip_only",
) -> list[FeatureVector]:
    return [
        template_features(c, t, space, method, shift_step, rotation_mode) for c in curves
    ]
