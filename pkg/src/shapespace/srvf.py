"""Shape space S2: square-root velocity representation of closed curves.

Unit-length curves map to the unit hypersphere of L2([0,1], R^2); closed
curves satisfy an additional 2-D closure constraint.  Distances are great
circle arcs, optionally minimized over rotations, cyclic start-point
shifts, and piecewise-linear reparameterizations found by dynamic
programming.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .contour import NormalizedCurve


class SrvfError(ValueError):
    pass


@dataclass(frozen=True)
class SrvfCurve:
    """Discretized q function on the uniform grid over [0, 1)."""

    q: np.ndarray  # (n, 2)
    closure_residual: np.ndarray  # (2,)

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def dt(self) -> float:
        return 1.0 / self.n


@dataclass(frozen=True)
class AlignmentResult:
    rotation: np.ndarray  # (2, 2), det +1
    shift: int = 0
    used_dp: bool = False
    gamma: np.ndarray | None = None  # (n + 1,) reparameterization nodes


def _closure(q: np.ndarray, dt: float) -> np.ndarray:
    return (q * np.linalg.norm(q, axis=1)[:, None]).sum(axis=0) * dt


def _normalized(q: np.ndarray, dt: float) -> np.ndarray:
    return q / math.sqrt((q**2).sum() * dt)


def to_srvf(curve: NormalizedCurve) -> SrvfCurve:
    """q = beta' / sqrt(|beta'|), central differences with wraparound."""
    pts = curve.points
    n = len(pts)
    dt = 1.0 / n
    dbeta = (np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)) / (2.0 * dt)
    speed = np.linalg.norm(dbeta, axis=1)
    if speed.min() < 1e-12:
        raise SrvfError("stationary point on curve")
    q = dbeta / np.sqrt(speed)[:, None]
    q = _normalized(q, dt)
    return SrvfCurve(q=q, closure_residual=_closure(q, dt))


def from_srvf(s: SrvfCurve) -> np.ndarray:
    """Curve points beta(t) = integral q|q|, centered at the centroid."""
    v = s.q * np.linalg.norm(s.q, axis=1)[:, None]
    beta = np.vstack(([0.0, 0.0], np.cumsum(0.5 * (v[:-1] + v[1:]), axis=0) * s.dt))
    return beta - beta.mean(axis=0)


def project_closed(s: SrvfCurve, tol: float = 1e-6, max_iter: int = 50) -> SrvfCurve:
    """Project onto the closed-curve constraint set.

    Newton iteration on the 2-D closure residual, moving along the span of
    the residual gradients and renormalizing to the sphere each step.
    """
    q = s.q.copy()
    dt = s.dt
    res = _closure(q, dt)
    for _ in range(max_iter):
        if np.linalg.norm(res) < tol:
            return SrvfCurve(q=q, closure_residual=res)
        norms = np.linalg.norm(q, axis=1)
        safe = np.where(norms > 1e-12, norms, 1e-12)
        # gradient fields of the two residual components
        w = np.zeros((2, len(q), 2))
        for a in range(2):
            w[a] = (q[:, a] / safe)[:, None] * q
            w[a][:, a] += norms
        J = np.array([[(w[a] * w[b]).sum() * dt for b in range(2)] for a in range(2)])
        try:
            delta = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError as exc:
            raise SrvfError(f"closure projection singular at residual {res}") from exc
        q = q + delta[0] * w[0] + delta[1] * w[1]
        q = _normalized(q, dt)
        res = _closure(q, dt)
    if np.linalg.norm(res) < tol:
        return SrvfCurve(q=q, closure_residual=res)
    raise SrvfError(f"closure projection did not converge: residual {res}")


def sphere_distance(a: SrvfCurve, b: SrvfCurve) -> float:
    """Great-circle distance between two unit-norm q functions."""
    if a.n != b.n:
        raise SrvfError(f"grid mismatch: {a.n} vs {b.n}")
    ip = float((a.q * b.q).sum() * a.dt)
    return math.acos(max(-1.0, min(1.0, ip)))


def rotate(s: SrvfCurve, rotation: np.ndarray) -> SrvfCurve:
    return replace(s, q=s.q @ rotation.T)


def _best_rotation(qa: np.ndarray, qb: np.ndarray, dt: float) -> np.ndarray:
    # maximize <qa, O qb> over SO(2)
    M = qb.T @ qa * dt
    U, _, Vt = np.linalg.svd(M)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    return Vt.T @ np.diag([1.0, d]) @ U.T


_IDENTITY = np.eye(2)
_FLIP = -np.eye(2)


def align_rotation(a: SrvfCurve, b: SrvfCurve, mode: str = "flip_only") -> AlignmentResult:
    """Pick the rotation of b (within the mode's candidate set) closest to a.

    none: identity only; flip_only: identity or rotation by pi (the
    major-axis ambiguity); procrustes: the SO(2) optimum.
    """
    if a.n != b.n:
        raise SrvfError(f"grid mismatch: {a.n} vs {b.n}")
    if mode == "none":
        candidates = [_IDENTITY]
    elif mode == "flip_only":
        candidates = [_IDENTITY, _FLIP]
    elif mode == "procrustes":
        candidates = [_IDENTITY, _FLIP, _best_rotation(a.q, b.q, a.dt)]
    else:
        raise SrvfError(f"unknown rotation mode {mode!r}")
    ips = [float((a.q * (b.q @ O.T)).sum() * a.dt) for O in candidates]
    best = int(np.argmax(ips))
    return AlignmentResult(rotation=candidates[best])


def srvf_distance_fixed(
    a: NormalizedCurve | SrvfCurve,
    b: NormalizedCurve | SrvfCurve,
    mode: str = "flip_only",
) -> float:
    """Fixed-parameterization distance: no shift or gamma search."""
    qa = prepare(a)
    qb = prepare(b)
    res = align_rotation(qa, qb, mode)
    return sphere_distance(qa, rotate(qb, res.rotation))


def prepare(c: NormalizedCurve | SrvfCurve) -> SrvfCurve:
    """SRVF transform plus closure projection (no-op on SrvfCurve input)."""
    if isinstance(c, SrvfCurve):
        return c
    return project_closed(to_srvf(c))


def _shift_candidates(n: int, step: int) -> range:
    if step < 1:
        raise SrvfError("shift_step must be >= 1")
    return range(0, n, step)


def srvf_distance_elastic(
    a: NormalizedCurve | SrvfCurve,
    b: NormalizedCurve | SrvfCurve,
    shift_step: int = 5,
    rotation_mode: str = "flip_only",
    use_dp: bool = False,
    dp_band: int | None = None,
) -> tuple[float, AlignmentResult]:
    """Distance minimized over cyclic start shifts (stride shift_step), each
    combined with rotation alignment; optionally refined by DP matching.

    The DP refinement is applied to the best shift candidate only and the
    identity reparameterization stays in the candidate set, so the result
    never exceeds the shift-only minimum.
    """
    qa = prepare(a)
    qb = prepare(b)
    n = qa.n
    best_d = math.inf
    best_shift = 0
    best_rot = _IDENTITY
    for s in _shift_candidates(n, shift_step):
        qs = replace(qb, q=np.roll(qb.q, -s, axis=0))
        res = align_rotation(qa, qs, rotation_mode)
        d = sphere_distance(qa, rotate(qs, res.rotation))
        if d < best_d:
            best_d, best_shift, best_rot = d, s, res.rotation
    result = AlignmentResult(rotation=best_rot, shift=best_shift)
    if use_dp:
        qs = np.roll(qb.q, -best_shift, axis=0) @ best_rot.T
        gamma = dp_reparameterize(qa.q, qs, band=dp_band if dp_band is not None else max(4, n // 10))
        qw = warp(qs, gamma)
        qw_curve = SrvfCurve(q=qw, closure_residual=_closure(qw, 1.0 / n))
        res2 = align_rotation(qa, qw_curve, rotation_mode)
        d2 = sphere_distance(qa, rotate(qw_curve, res2.rotation))
        if d2 < best_d:
            best_d = d2
            result = AlignmentResult(
                rotation=res2.rotation @ best_rot, shift=best_shift, used_dp=True, gamma=gamma
            )
    return best_d, result


def dp_reparameterize(q1: np.ndarray, q2: np.ndarray, band: int | None = None) -> np.ndarray:
    """Piecewise-linear gamma maximizing the warped inner product.

    Dynamic programming over the (n+1) x (n+1) node grid with a fixed set
    of local slopes; `band` restricts |i - j| (None for the exact grid).
    Returns the n+1 gamma nodes, gamma[0] = 0, gamma[n] = 1, strictly
    increasing.
    """
    n = len(q1)
    steps = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2), (3, 4), (4, 3), (1, 4), (4, 1)]
    q2ext = np.vstack((q2, q2[:1]))

    def q2_at(pos: np.ndarray) -> np.ndarray:
        idx = np.clip(pos.astype(int), 0, n - 1)
        frac = pos - idx
        return q2ext[idx] * (1.0 - frac)[:, None] + q2ext[idx + 1] * frac[:, None]

    neg = -1e30
    H = np.full((n + 1, n + 1), neg)
    H[0, 0] = 0.0
    choice = np.full((n + 1, n + 1), -1, dtype=np.int8)
    dtv = 1.0 / n

    # per-step edge energies, vectorized over the target node grid
    energies = []
    for di, dj in steps:
        m = dj / di
        E = np.zeros((n + 1, n + 1))
        for k in range(di):
            # contribution of source sample i - di + k against q2 at j - dj + m*k
            ii = np.arange(di - k, n + 1 - k)  # valid target rows i
            rows = q1[ii - di + np.full_like(ii, k)]
            jj = np.arange(0, n + 1, dtype=float)
            q2rows = q2_at(np.clip(jj - dj + m * k, 0.0, n))
            contrib = rows @ q2rows.T * math.sqrt(m) * dtv
            E[ii[:, None], np.arange(n + 1)[None, :]] += contrib
        energies.append(E)

    jgrid = np.arange(n + 1)
    for i in range(1, n + 1):
        if band is not None:
            jmask = np.abs(jgrid - i) <= band
        else:
            jmask = np.ones(n + 1, dtype=bool)
        for si, (di, dj) in enumerate(steps):
            if i - di < 0:
                continue
            prev = H[i - di]
            cand = np.full(n + 1, neg)
            cand[dj:] = prev[:-dj] + energies[si][i, dj:]
            upd = jmask & (cand > H[i])
            H[i][upd] = cand[upd]
            choice[i][upd] = si
    if choice[n, n] < 0:
        return np.linspace(0.0, 1.0, n + 1)

    # backtrack node path, then fill gamma by linear interpolation
    path = [(n, n)]
    i, j = n, n
    while (i, j) != (0, 0):
        di, dj = steps[choice[i, j]]
        i, j = i - di, j - dj
        path.append((i, j))
    path.reverse()
    pi = np.array([p[0] for p in path], dtype=float)
    pj = np.array([p[1] for p in path], dtype=float)
    gamma = np.interp(np.arange(n + 1, dtype=float), pi, pj) / n
    return gamma


def warp(q: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Apply gamma: q(gamma(t)) * sqrt(gamma'(t)), renormalized."""
    n = len(q)
    qext = np.vstack((q, q[:1]))
    pos = gamma[:-1] * n
    idx = np.clip(pos.astype(int), 0, n - 1)
    frac = pos - idx
    qg = qext[idx] * (1.0 - frac)[:, None] + qext[idx + 1] * frac[:, None]
    dgamma = np.diff(gamma) * n
    qw = qg * np.sqrt(np.maximum(dgamma, 0.0))[:, None]
    return _normalized(qw, 1.0 / n)


def srvf_geodesic(a: SrvfCurve, b: SrvfCurve, steps: int) -> list[np.ndarray]:
    """Spherical interpolation between aligned SRVFs, each frame projected
    back onto the closed-curve set and mapped to curve points.

    Returns steps + 2 frames including the endpoints.
    """
    psi = sphere_distance(a, b)
    if psi >= math.pi - 1e-6:
        raise SrvfError("non-unique geodesic: antipodal pair")
    frames = []
    for tau in np.linspace(0.0, 1.0, steps + 2):
        if psi < 1e-12:
            q = a.q.copy()
        else:
            q = (math.sin((1.0 - tau) * psi) * a.q + math.sin(tau * psi) * b.q) / math.sin(psi)
        s = SrvfCurve(q=_normalized(q, a.dt), closure_residual=_closure(q, a.dt))
        s = project_closed(s)
        frames.append(from_srvf(s))
    return frames
