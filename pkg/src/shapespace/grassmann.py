"""Shape space S1: curves as points on a Grassmannian of function pairs.

A unit-length closed curve is represented by an orthonormal pair (e, f) of
real functions on [0, 2pi); the geodesic distance between two shapes is the
Euclidean norm of the Jordan (principal) angles between the spanned planes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import NormalizedCurve

MAX_DISTANCE = math.pi / math.sqrt(2.0)


class GrassmannError(ValueError):
    pass


@dataclass(frozen=True)
class GrassmannPoint:
    """Orthonormal function pair on the uniform grid over [0, 2pi)."""

    e: np.ndarray
    f: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.e)

    @property
    def dt(self) -> float:
        return 2.0 * math.pi / self.n


@dataclass(frozen=True)
class JordanAngles:
    psi1: float
    psi2: float


def tangent_angle(curve: NormalizedCurve) -> np.ndarray:
    """Continuous lift of the discrete tangent direction.

    Central differences with wraparound; unwrapped so consecutive samples
    never jump by more than pi, with theta[0] in [0, 2pi).
    """
    pts = curve.points
    d = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    theta = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    theta = theta - 2.0 * math.pi * math.floor(theta[0] / (2.0 * math.pi))
    return theta


def turning_total(curve: NormalizedCurve) -> float:
    """Total turning over one full traversal (2pi for a simple CCW curve)."""
    theta = tangent_angle(curve)
    closing = (theta[0] - theta[-1] + math.pi) % (2.0 * math.pi) - math.pi
    return float(theta[-1] - theta[0] + closing)


def _speed(curve: NormalizedCurve) -> np.ndarray:
    # per-sample speed |alpha'| = n * segment / (2pi); central average
    pts = curve.points
    fwd = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    bwd = np.roll(fwd, 1)
    return 0.5 * (fwd + bwd) * len(pts) / (2.0 * math.pi)


def to_grassmann(curve: NormalizedCurve) -> GrassmannPoint:
    """Map a canonical curve to its (e, f) representative.

    The analytic pair is orthonormal for closed unit-length curves;
    discretization drift is repaired by symmetric (polar) orthonormalization
    and the displacement it caused is recorded in the metadata.
    """
    theta = tangent_angle(curve)
    amp = np.sqrt(2.0 * _speed(curve))
    Q = np.column_stack((amp * np.cos(theta / 2.0), amp * np.sin(theta / 2.0)))
    dt = 2.0 * math.pi / len(Q)
    gram = Q.T @ Q * dt
    evals, evecs = np.linalg.eigh(gram)
    if evals[0] <= 0:
        raise GrassmannError("degenerate function pair")
    inv_half = evecs @ np.diag(1.0 / np.sqrt(evals)) @ evecs.T
    Qo = Q @ inv_half
    displacement = float(np.sqrt(((Qo - Q) ** 2).sum() * dt))
    return GrassmannPoint(e=Qo[:, 0], f=Qo[:, 1], meta={"projection_displacement": displacement})


def basic_map(p: GrassmannPoint) -> tuple[np.ndarray, np.ndarray]:
    """Reconstruct curve points: alpha(t) = 1/2 integral (e + i f)^2.

    Returns (points, closure residual); the residual is the full-period
    integral, zero exactly when the pair encodes a closed curve.
    """
    z = 0.5 * (p.e + 1j * p.f) ** 2
    dt = p.dt
    alpha = np.concatenate(([0.0 + 0.0j], np.cumsum(0.5 * (z[:-1] + z[1:])) * dt))
    residual_c = z.sum() * dt
    pts = np.column_stack((alpha.real, alpha.imag))
    return pts, np.array([residual_c.real, residual_c.imag])


def _angle_matrix(a: GrassmannPoint, b: GrassmannPoint) -> np.ndarray:
    if a.n != b.n:
        raise GrassmannError(f"grid mismatch: {a.n} vs {b.n}")
    dt = a.dt
    return np.array(
        [
            [np.dot(a.e, b.e), np.dot(a.e, b.f)],
            [np.dot(a.f, b.e), np.dot(a.f, b.f)],
        ]
    ) * dt


def grassmann_distance(a: GrassmannPoint, b: GrassmannPoint) -> tuple[float, JordanAngles]:
    """Jordan-angle geodesic distance between the two spanned planes."""
    A = _angle_matrix(a, b)
    sv = np.clip(np.linalg.svd(A, compute_uv=False), 0.0, 1.0)
    psi = np.arccos(sv)
    return float(np.sqrt((psi**2).sum())), JordanAngles(float(psi[0]), float(psi[1]))


def shifted(p: GrassmannPoint, shift: int) -> GrassmannPoint:
    """(e, f) of the curve with its start point advanced by `shift` samples.

    Rolling the curve rolls the tangent lift up to a 2pi jump across the
    seam, which flips the half-angle sign on the wrapped prefix.
    """
    shift %= p.n
    if shift == 0:
        return p
    e = np.concatenate((p.e[shift:], -p.e[:shift]))
    f = np.concatenate((p.f[shift:], -p.f[:shift]))
    return GrassmannPoint(e=e, f=f, meta=dict(p.meta))


def grassmann_distance_minshift(
    a: NormalizedCurve | GrassmannPoint,
    b: NormalizedCurve | GrassmannPoint,
    step: int = 5,
) -> tuple[float, int]:
    """Distance minimized over cyclic start-point shifts of b (stride `step`)."""
    ga = a if isinstance(a, GrassmannPoint) else to_grassmann(a)
    gb = b if isinstance(b, GrassmannPoint) else to_grassmann(b)
    if step < 1:
        raise GrassmannError("step must be >= 1")
    best_d, best_shift = math.inf, 0
    for s in range(0, ga.n, step):
        d, _ = grassmann_distance(ga, shifted(gb, s))
        if d < best_d:
            best_d, best_shift = d, s
    return best_d, best_shift


def _rot2(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def grassmann_geodesic(a: GrassmannPoint, b: GrassmannPoint, steps: int) -> list[np.ndarray]:
    """Curves along the Grassmann geodesic from a to b.

    Returns steps + 2 frames (endpoints included).  The principal-vector
    bases are rotated back along the path so the endpoint frames reproduce
    the input pairs exactly rather than up to an in-plane rotation.
    """
    A = _angle_matrix(a, b)
    Ba = np.column_stack((a.e, a.f))
    Bb = np.column_stack((b.e, b.f))
    if np.linalg.det(A) < 0:
        # orientation-reversing pair: flip the sign of f2, which spans the
        # same (unoriented) plane
        Bb = np.column_stack((b.e, -b.f))
        A = A @ np.diag([1.0, -1.0])
    U, sv, Vt = np.linalg.svd(A)
    sv = np.clip(sv, 0.0, 1.0)
    psi = np.arccos(sv)
    if np.any(psi > math.pi / 2 - 1e-9):
        raise GrassmannError("conjugate-point geodesic: principal vector undefined")
    E1 = Ba @ U
    E2 = Bb @ Vt.T
    W = np.zeros_like(E1)
    for i in range(2):
        if psi[i] > 1e-12:
            W[:, i] = (E2[:, i] - sv[i] * E1[:, i]) / math.sin(psi[i])
    V = Vt.T
    omega_rot = V @ U.T  # in SO(2) after the det fix above
    omega = math.atan2(omega_rot[1, 0], omega_rot[0, 0])

    frames = []
    for tau in np.linspace(0.0, 1.0, steps + 2):
        F = E1 * np.cos(tau * psi) + W * np.sin(tau * psi)
        B = F @ (_rot2(tau * omega) @ U).T
        point = GrassmannPoint(e=B[:, 0], f=B[:, 1])
        pts, _ = basic_map(point)
        frames.append(pts - pts.mean(axis=0))
    return frames
