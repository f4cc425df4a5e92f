"""Contour ingestion and canonicalization of closed planar curves.

A raw contour is an ordered polygon in arbitrary units.  Canonicalization
produces the fixed parameterization used everywhere else: n equal-chord
samples on a unit-length, centroid-centered, counterclockwise curve whose
major axis lies along x and whose first sample sits on the intersection of
the contour with the positive x-axis.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from shapely.geometry import LinearRing

NORMAL = "Normal"
SICKLE = "Sickle"
OTHER = "OtherDeformation"
CLASS_ORDER = (NORMAL, SICKLE, OTHER)

_LABEL_ALIASES = {
    "normal": NORMAL,
    "n": NORMAL,
    "sickle": SICKLE,
    "s": SICKLE,
    "other": OTHER,
    "od": OTHER,
    "otherdeformation": OTHER,
    "other_deformation": OTHER,
    "otherdeformations": OTHER,
}

# Rotations smaller than this are treated as "already aligned".  Keeps
# normalize idempotent: re-running it on its own output re-estimates the
# axis with an O(h^2) sampling drift that must not trigger a re-rotation.
AXIS_SNAP = 5e-5


class ContourError(ValueError):
    """Invalid or degenerate contour input."""


def parse_label(text: str | None) -> str | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return None
    return _LABEL_ALIASES.get(text.lower().replace(" ", ""), text)


@dataclass(frozen=True)
class RawContour:
    """Ordered polygon of 2-D points, implicitly closed (last -> first)."""

    points: np.ndarray
    id: str = ""
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class NormalizedCurve:
    """Canonical equal-chord representation of a closed shape.

    meta carries provenance: source id, label, and the rotation (radians)
    applied during major-axis alignment.
    """

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def id(self) -> str:
        return self.meta.get("source_id", "")

    @property
    def label(self) -> str | None:
        return self.meta.get("label")

    def rolled(self, shift: int) -> "NormalizedCurve":
        """Cyclically advance the start point by `shift` samples."""
        return replace(self, points=np.roll(self.points, -shift, axis=0))

    def as_raw(self) -> RawContour:
        return RawContour(points=self.points.copy(), id=self.id, label=self.label)


def dedupe_points(points: np.ndarray) -> np.ndarray:
    """Drop consecutive duplicates and a closing point equal to the first."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ContourError("contour points must be an (m, 2) array")
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = pts[keep]
    if len(pts) > 1 and np.all(pts[-1] == pts[0]):
        pts = pts[:-1]
    return pts


def validate_contour(c: RawContour) -> RawContour:
    """Reject degenerate or self-intersecting contours."""
    pts = dedupe_points(c.points)
    if len(pts) < 3:
        raise ContourError(f"degenerate contour {c.id!r}: fewer than 3 distinct points")
    if not LinearRing(pts).is_simple:
        raise ContourError(f"contour {c.id!r} is self-intersecting")
    return replace(c, points=pts)


def signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def perimeter(points: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1).sum())


def orient_ccw(c: RawContour) -> RawContour:
    """Ensure counterclockwise traversal (signed area > 0)."""
    pts = dedupe_points(c.points)
    if len(pts) < 3:
        raise ContourError(f"degenerate contour {c.id!r}: fewer than 3 distinct points")
    area = signed_area(pts)
    if abs(2.0 * area) <= 1e-12 * perimeter(pts) ** 2:
        raise ContourError(f"degenerate (collinear) contour {c.id!r}")
    if area < 0:
        pts = pts[::-1].copy()
    return replace(c, points=pts)


def _closed_cumlen(points: np.ndarray) -> np.ndarray:
    seg = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
    return np.concatenate(([0.0], np.cumsum(seg)))


def _points_at(points: np.ndarray, cum: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Linear interpolation at arc positions s on the closed polygon."""
    total = cum[-1]
    s = np.asarray(s, dtype=float) % total
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(points) - 1)
    seg = cum[idx + 1] - cum[idx]
    u = (s - cum[idx]) / np.where(seg > 0, seg, 1.0)
    nxt = (idx + 1) % len(points)
    return points[idx] + (points[nxt] - points[idx]) * u[:, None]


def resample_closed(
    points: np.ndarray,
    n: int,
    s0: float = 0.0,
    rel_tol: float = 1e-13,
    max_iter: int = 200,
) -> np.ndarray:
    """n points on the polygon with equal chord spacing, anchored at arc s0.

    Plain uniform arc-length placement leaves chords unequal wherever a
    sample straddles a vertex, so the arc positions are redistributed
    iteratively until the chord lengths agree to rel_tol.
    """
    if n < 3:
        raise ContourError("resampling needs n >= 3")
    cum = _closed_cumlen(points)
    total = cum[-1]
    if total <= 0:
        raise ContourError("zero-length contour")
    su = s0 + np.arange(n) * (total / n)
    out = _points_at(points, cum, su)
    for _ in range(max_iter):
        chords = np.linalg.norm(np.roll(out, -1, axis=0) - out, axis=1)
        mean = chords.mean()
        if mean <= 0 or (chords.max() - chords.min()) <= rel_tol * mean:
            break
        ccum = np.concatenate(([0.0], np.cumsum(chords)))
        target = np.arange(n) * (ccum[-1] / n)
        su = np.interp(target, ccum, np.concatenate((su, [s0 + total])))
        out = _points_at(points, cum, su)
    return out


def resample_equidistant(c: RawContour, n: int) -> RawContour:
    """Equal-chord resampling anchored at the first vertex."""
    pts = dedupe_points(c.points)
    if len(pts) < 3:
        raise ContourError(f"degenerate contour {c.id!r}")
    return replace(c, points=resample_closed(pts, n))


def principal_axis(points: np.ndarray) -> tuple[float, bool]:
    """Angle in [0, pi) of the dominant covariance eigenvector.

    Returns (angle, degenerate).  Near-isotropic point sets (circles) have
    no meaningful axis; those report angle 0 with the degenerate flag set.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise ContourError("principal axis needs at least 3 points")
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / len(pts)
    evals, evecs = np.linalg.eigh(cov)
    if evals[1] <= 0 or (evals[1] - evals[0]) <= 1e-12 * evals[1]:
        return 0.0, True
    v = evecs[:, 1]
    return float(math.atan2(v[1], v[0]) % math.pi), False


def _rotation_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _axis_crossings(points: np.ndarray) -> list[tuple[float, float]]:
    """(x, arc position) of every intersection of the polygon with y = 0."""
    y = points[:, 1]
    x = points[:, 0]
    cum = _closed_cumlen(points)
    m = len(points)
    out = []
    for i in range(m):
        j = (i + 1) % m
        if y[i] == 0.0:
            out.append((x[i], cum[i]))
        elif (y[i] > 0) != (y[j] > 0) and y[j] != 0.0:
            u = y[i] / (y[i] - y[j])
            out.append((x[i] + u * (x[j] - x[i]), cum[i] + u * (cum[i + 1] - cum[i])))
    return out


def _start_anchor(points: np.ndarray) -> float:
    """Arc position of the largest-x intersection with the positive x-axis.

    Falls back to the largest-x crossing of the full x-axis, then to the
    max-x vertex, for shapes that never cross the positive half-axis.
    """
    crossings = _axis_crossings(points)
    positive = [c for c in crossings if c[0] > 0]
    pool = positive or crossings
    if not pool:
        cum = _closed_cumlen(points)
        return float(cum[np.argmax(points[:, 0])])
    best = max(pool, key=lambda c: (c[0], -c[1]))
    return float(best[1])


def align_and_fix_start(
    points: np.ndarray,
    meta: dict | None = None,
    base_polygon: np.ndarray | None = None,
) -> NormalizedCurve:
    """Rotate the major axis onto x and re-anchor the parameterization.

    The start point is placed exactly on the largest-x crossing of the
    positive x-axis (not snapped to an existing sample): sub-sample
    anchoring is what keeps distances invariant under resampling shifts
    of the raw input.  `base_polygon` optionally supplies a
    higher-resolution substrate for the final resampling so the result
    does not cut the corners of an intermediate polygon twice.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    angle, degenerate = principal_axis(pts)
    rotation = 0.0
    if not degenerate:
        rotation = -angle if angle <= math.pi / 2 else math.pi - angle
        if abs(rotation) < AXIS_SNAP:
            rotation = 0.0
    base = pts if base_polygon is None else np.asarray(base_polygon, dtype=float)
    rot = _rotation_matrix(rotation)
    base = base @ rot.T
    if not degenerate:
        # the axis fixes the line, not the direction: resolve the two-fold
        # ambiguity by putting the farther-reaching end on positive x
        centered = base - base.mean(axis=0)
        if centered[:, 0].max() < -centered[:, 0].min():
            rotation += math.pi
            base = 2.0 * base.mean(axis=0) - base

    # Joint fixed point: the anchored resample must simultaneously have
    # zero vertex centroid and unit perimeter, with its first point on the
    # axis crossing of the *final* frame.  Iterating translation and scale
    # converges in a few rounds and makes normalize an exact no-op on its
    # own output.
    shift = np.zeros(2)
    scale = 1.0
    out = base
    for _ in range(12):
        frame = (base - shift) / scale
        anchor = _start_anchor(frame)
        out = resample_closed(frame, n, s0=anchor)
        d_mean = out.mean(axis=0)
        per = perimeter(out)
        if np.max(np.abs(d_mean)) < 1e-13 and abs(per - 1.0) < 1e-13:
            break
        shift = shift + scale * d_mean
        scale = scale * per
    out = (out - out.mean(axis=0)) / perimeter(out)

    meta = dict(meta or {})
    meta["rotation"] = rotation
    if degenerate:
        meta["degenerate_axis"] = True
    return NormalizedCurve(points=out, meta=meta)


def normalize(c: RawContour, n: int = 295) -> NormalizedCurve:
    """Full canonicalization: CCW, equal chords, unit length, centered,
    axis-aligned, start on the positive x-axis."""
    c = validate_contour(c)
    c = orient_ccw(c)
    provisional = resample_closed(c.points, n)
    center = provisional.mean(axis=0)
    scale = perimeter(provisional)
    provisional = (provisional - center) / scale
    base = (c.points - center) / scale
    return align_and_fix_start(
        provisional,
        meta={"source_id": c.id, "label": c.label},
        base_polygon=base,
    )


def check_invariants(curve: NormalizedCurve, *, step_tol: float = 1e-6) -> None:
    """Assert the canonical-form invariants; raises ContourError on failure."""
    pts = curve.points
    per = perimeter(pts)
    if abs(per - 1.0) > 1e-9:
        raise ContourError(f"length {per} not 1")
    centroid = pts.mean(axis=0)
    if np.max(np.abs(centroid)) > 1e-9:
        raise ContourError(f"centroid {centroid} not origin")
    chords = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    if (chords.max() - chords.min()) > step_tol * chords.mean():
        raise ContourError("arc steps not uniform")
    if signed_area(pts) <= 0:
        raise ContourError("orientation not counterclockwise")


def load_contour_file(path: Path | str) -> np.ndarray:
    """Plain-text contour: one 'x,y' pair per line, implicitly closed."""
    path = Path(path)
    pts = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(";", ",").split(",")
            if len(parts) != 2:
                raise ContourError(f"{path}:{lineno}: expected 'x,y', got {line!r}")
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ContourError(f"{path}:{lineno}: unparseable point {line!r}") from exc
    if len(pts) < 3:
        raise ContourError(f"degenerate contour in {path}: fewer than 3 points")
    return np.asarray(pts, dtype=float)


def load_contours(manifest_path: Path | str) -> list[RawContour]:
    """Read a 'path,label' CSV manifest and the contour files it names."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileNotFoundError(f"manifest not found: {manifest_path}")
    out = []
    with manifest_path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["path", "label"]:
            raise ContourError(f"{manifest_path}: expected header 'path,label'")
        for rowno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) < 1:
                raise ContourError(f"{manifest_path}: malformed row {rowno}")
            rel = row[0].strip()
            label = parse_label(row[1]) if len(row) > 1 else None
            path = manifest_path.parent / rel
            if not path.exists():
                raise ContourError(f"{manifest_path}: row {rowno}: missing file {path}")
            try:
                pts = load_contour_file(path)
                contour = validate_contour(RawContour(points=pts, id=Path(rel).stem, label=label))
            except ContourError as exc:
                raise ContourError(f"{manifest_path}: row {rowno}: {exc}") from exc
            out.append(contour)
    return out
