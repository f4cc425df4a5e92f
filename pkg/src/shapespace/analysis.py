"""Classification, clustering, evaluation metrics and the variance analysis.

Everything here is deterministic given (inputs, seed): stratified folds,
PAM with a greedy seed, and tie-breaking rules are all fixed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import grassmann, srvf
from .contour import CLASS_ORDER, NormalizedCurve


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class DistanceMatrix:
    ids: list[str]
    d: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.shape != (len(self.ids), len(self.ids)):
            raise AnalysisError("distance matrix shape does not match ids")
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 counts; rows are true classes, columns predictions (N, S, OD)."""

    n: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.n, dtype=int)
        if n.shape != (3, 3) or (n < 0).any():
            raise AnalysisError("confusion matrix must be 3x3 with non-negative counts")
        object.__setattr__(self, "n", n)

    @property
    def total(self) -> int:
        return int(self.n.sum())


@dataclass(frozen=True)
class MetricsReport:
    """Per-class TPR/P/F1 and overall Acc/SDS, all in percent.

    Zero-denominator entries are None (undefined), never reported as 0.
    """

    tpr: tuple
    precision: tuple
    f1: tuple
    acc: float
    sds: float

    def as_dict(self) -> dict:
        classes = list(CLASS_ORDER)
        return {
            "classes": classes,
            "TPR": dict(zip(classes, self.tpr)),
            "P": dict(zip(classes, self.precision)),
            "F1": dict(zip(classes, self.f1)),
            "Acc": self.acc,
            "SDS": self.sds,
        }


@dataclass(frozen=True)
class ClusterResult:
    k: int
    medoids: list[str]
    assignment: dict
    asw: float | None = None


def _pair_function(space: str, method: str, shift_step: int, rotation_mode: str, curves):
    """Precompute per-curve representations; return a pairwise closure."""
    if space == "S1":
        reps = [grassmann.to_grassmann(c) for c in curves]
        if method == "fixed":
            return reps, lambda a, b: grassmann.grassmann_distance(a, b)[0]
        if method == "reparam":
            return reps, lambda a, b: grassmann.grassmann_distance_minshift(a, b, step=shift_step)[0]
    elif space == "S2":
        reps = [srvf.prepare(c) for c in curves]
        if method == "fixed":
            return reps, lambda a, b: srvf.srvf_distance_fixed(a, b, mode=rotation_mode)
        if method == "reparam":
            return reps, lambda a, b: srvf.srvf_distance_elastic(
                a, b, shift_step=shift_step, rotation_mode=rotation_mode
            )[0]
    raise AnalysisError(f"unknown space/method {space!r}/{method!r}")


def distance_matrix(
    curves: list[NormalizedCurve],
    space: str = "S2",
    method: str = "fixed",
    shift_step: int = 5,
    rotation_mode: str = "flip_only",
) -> DistanceMatrix:
    """Symmetric pairwise matrix; only the upper triangle is computed.

    The shift-search methods are asymmetric in principle; the matrix stores
    min(d(a,b), d(b,a)) and records that in the metadata.
    """
    if len(curves) < 2:
        raise AnalysisError("need at least 2 curves")
    ids = [c.id or str(i) for i, c in enumerate(curves)]
    reps, pair = _pair_function(space, method, shift_step, rotation_mode, curves)
    k = len(curves)
    d = np.zeros((k, k))
    symmetrized = method == "reparam"
    for i in range(k):
        for j in range(i + 1, k):
            try:
                dij = pair(reps[i], reps[j])
                if symmetrized:
                    dij = min(dij, pair(reps[j], reps[i]))
            except Exception as exc:
                raise AnalysisError(f"distance failed for pair ({ids[i]}, {ids[j]}): {exc}") from exc
            d[i, j] = d[j, i] = dij
    return DistanceMatrix(
        ids=ids,
        d=d,
        meta={
            "space": space,
            "method": method,
            "shift_step": shift_step,
            "rotation_mode": rotation_mode,
            "symmetrized": symmetrized,
        },
    )


def stratified_folds(labels: list, folds: int, seed: int) -> np.ndarray:
    """Deterministic stratified fold assignment (one fold index per item)."""
    if folds < 2:
        raise AnalysisError("folds must be >= 2")
    labels = list(labels)
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(labels), dtype=int)
    for lab in sorted(set(labels), key=str):
        idx = np.flatnonzero([l == lab for l in labels])
        if len(idx) < folds:
            raise AnalysisError(f"class {lab!r} has fewer members ({len(idx)}) than folds")
        idx = rng.permutation(idx)
        fold_of[idx] = np.arange(len(idx)) % folds
    return fold_of


def _class_rank(label) -> int:
    try:
        return CLASS_ORDER.index(label)
    except ValueError:
        return len(CLASS_ORDER)


def knn_classify(
    dm: DistanceMatrix,
    labels: list,
    k: int = 1,
    folds: int = 5,
    seed: int = 0,
) -> list:
    """k-NN with a precomputed distance matrix and stratified CV folds.

    Each item is predicted from its k nearest out-of-fold neighbors;
    voting ties break by smaller mean neighbor distance, then class order.
    """
    if len(labels) != len(dm.ids):
        raise AnalysisError("labels must cover every id")
    fold_of = stratified_folds(labels, folds, seed)
    labels = list(labels)
    preds = []
    for i in range(len(labels)):
        pool = np.flatnonzero(fold_of != fold_of[i])
        order = pool[np.lexsort((pool, dm.d[i, pool]))]
        nearest = order[: max(1, min(k, len(order)))]
        votes = {}
        for j in nearest:
            votes.setdefault(labels[j], []).append(dm.d[i, j])
        best = min(
            votes.items(),
            key=lambda kv: (-len(kv[1]), float(np.mean(kv[1])), _class_rank(kv[0])),
        )
        preds.append(best[0])
    return preds


def lda_classify(
    features: np.ndarray,
    labels: list,
    folds: int = 5,
    seed: int = 0,
) -> list:
    """Linear discriminant analysis with pooled covariance and equal priors.

    Features are the 2-D template distances; per-fold training, linear
    scores argmax.  A singular pooled covariance is regularized once by
    1e-9 * trace * I before failing.
    """
    X = np.asarray(features, dtype=float)
    labels = list(labels)
    if len(X) != len(labels):
        raise AnalysisError("feature/label length mismatch")
    classes = sorted(set(labels), key=_class_rank)
    for cl in classes:
        if sum(1 for l in labels if l == cl) < 2:
            raise AnalysisError(f"class {cl!r} needs at least 2 samples")
    fold_of = stratified_folds(labels, folds, seed)
    preds: list = [None] * len(labels)
    for f in range(folds):
        train = np.flatnonzero(fold_of != f)
        test = np.flatnonzero(fold_of == f)
        means = {}
        pooled = np.zeros((X.shape[1], X.shape[1]))
        total = 0
        for cl in classes:
            idx = [i for i in train if labels[i] == cl]
            mu = X[idx].mean(axis=0)
            means[cl] = mu
            centered = X[idx] - mu
            pooled += centered.T @ centered
            total += len(idx) - 1
        pooled /= max(total, 1)
        try:
            inv = np.linalg.inv(pooled)
        except np.linalg.LinAlgError:
            pooled = pooled + 1e-9 * np.trace(pooled) * np.eye(X.shape[1])
            try:
                inv = np.linalg.inv(pooled)
            except np.linalg.LinAlgError as exc:
                raise AnalysisError("singular pooled covariance") from exc
        if not np.isfinite(inv).all():
            raise AnalysisError("singular pooled covariance")
        for i in test:
            scores = {
                cl: float(X[i] @ inv @ mu - 0.5 * mu @ inv @ mu) for cl, mu in means.items()
            }
            preds[i] = max(classes, key=lambda cl: (scores[cl], -_class_rank(cl)))
    return preds


def kmedoids(dm: DistanceMatrix, k: int, seed: int = 0) -> ClusterResult:
    """PAM with a deterministic greedy seed.

    First medoid minimizes total distance; the rest maximize the minimum
    distance to medoids already chosen.  Swap phase applies the best
    improving (medoid, candidate) swap until none remains.
    """
    d = dm.d
    m = len(dm.ids)
    if not 2 <= k <= m:
        raise AnalysisError(f"k={k} out of range for {m} points")
    if k > len({tuple(row) for row in np.round(d, 12)}):
        raise AnalysisError("k exceeds the number of distinct points")

    medoids = [int(np.argmin(d.sum(axis=0)))]
    while len(medoids) < k:
        mind = d[:, medoids].min(axis=1)
        mind[medoids] = -1.0
        medoids.append(int(np.argmax(mind)))

    def cost(meds: list[int]) -> float:
        return float(d[:, meds].min(axis=1).sum())

    current = cost(medoids)
    improved = True
    while improved:
        improved = False
        best = (0.0, None, None)
        med_set = set(medoids)
        for mi, med in enumerate(medoids):
            for cand in range(m):
                if cand in med_set:
                    continue
                trial = medoids.copy()
                trial[mi] = cand
                c = cost(trial)
                if current - c > best[0] + 1e-12:
                    best = (current - c, mi, cand)
        if best[1] is not None:
            medoids[best[1]] = best[2]
            current -= best[0]
            improved = True
    medoids.sort()
    nearest = np.asarray(medoids)[np.argmin(d[:, medoids], axis=1)]
    assignment = {dm.ids[i]: int(np.flatnonzero(np.asarray(medoids) == nearest[i])[0]) for i in range(m)}
    result = ClusterResult(
        k=k,
        medoids=[dm.ids[i] for i in medoids],
        assignment=assignment,
    )
    asw = silhouette(dm, assignment) if k >= 2 and len(set(assignment.values())) >= 2 else None
    return ClusterResult(k=k, medoids=result.medoids, assignment=assignment, asw=asw)


def silhouette(dm: DistanceMatrix, assignment: dict) -> float:
    """Average silhouette width; singleton clusters contribute 0."""
    groups: dict = {}
    for i, cid in enumerate(dm.ids):
        groups.setdefault(assignment[cid], []).append(i)
    if len(groups) < 2:
        raise AnalysisError("silhouette needs at least 2 groups")
    scores = []
    for g, members in groups.items():
        for i in members:
            if len(members) == 1:
                scores.append(0.0)
                continue
            a = dm.d[i, [j for j in members if j != i]].mean()
            b = min(dm.d[i, other].mean() for go, other in groups.items() if go != g)
            denom = max(a, b)
            scores.append(0.0 if denom == 0 else (b - a) / denom)
    return float(np.mean(scores))


def cluster_confusion(cr: ClusterResult, labels: dict):
    """Match 3 groups to the 3 classes by maximum agreement.

    For k != 3 a raw contingency table (groups x classes) is returned
    instead of a matched confusion matrix.
    """
    ids = list(cr.assignment)
    contingency = np.zeros((cr.k, 3), dtype=int)
    for cid in ids:
        rank = _class_rank(labels[cid])
        if rank >= 3:
            raise AnalysisError(f"unknown class label {labels[cid]!r} for {cid}")
        contingency[cr.assignment[cid], rank] += 1
    if cr.k != 3:
        return contingency
    best_perm, best_score = None, -1
    for perm in itertools.permutations(range(3)):
        score = sum(contingency[g, perm[g]] for g in range(3))
        if score > best_score:
            best_score, best_perm = score, perm
    n = np.zeros((3, 3), dtype=int)
    for g in range(3):
        for c in range(3):
            n[c, best_perm[g]] += contingency[g, c]
    return ConfusionMatrix(n=n)


def confusion_from_predictions(true_labels: list, predicted: list) -> ConfusionMatrix:
    n = np.zeros((3, 3), dtype=int)
    for t, p in zip(true_labels, predicted):
        i, j = _class_rank(t), _class_rank(p)
        if i >= 3 or j >= 3:
            raise AnalysisError(f"unknown class in ({t!r}, {p!r})")
        n[i, j] += 1
    return ConfusionMatrix(n=n)


def _pct(num: float, den: float) -> float | None:
    return None if den == 0 else 100.0 * num / den


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """TPR, precision, F1 per class plus accuracy and the SDS score.

    SDS forgives Sickle <-> OtherDeformation confusion; its numerator adds
    n23 and n32 to the diagonal.
    """
    n = cm.n
    total = cm.total
    if total == 0:
        raise AnalysisError("empty confusion matrix")
    tpr, prec, f1 = [], [], []
    for i in range(3):
        t = _pct(n[i, i], n[i, :].sum())
        p = _pct(n[i, i], n[:, i].sum())
        tpr.append(t)
        prec.append(p)
        if t is None or p is None or (t + p) == 0:
            f1.append(None)
        else:
            f1.append(2.0 * p * t / (p + t))
    acc = 100.0 * np.trace(n) / total
    sds = 100.0 * (np.trace(n) + n[1, 2] + n[2, 1]) / total
    return MetricsReport(tpr=tuple(tpr), precision=tuple(prec), f1=tuple(f1), acc=acc, sds=sds)


@dataclass(frozen=True)
class AnovaResult:
    ss_rows: float
    ss_cols: float
    ss_error: float
    ss_total: float
    df_rows: int
    df_cols: int
    df_error: int
    f_rows: float | None
    f_cols: float | None
    f_crit_rows: float
    f_crit_cols: float
    p_rows: float | None
    p_cols: float | None


def anova_two_way(table: np.ndarray, alpha: float = 0.05) -> AnovaResult:
    """Two-factor ANOVA without replication on an r x c table of means."""
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[0] < 2 or table.shape[1] < 2:
        raise AnalysisError("ANOVA needs an r x c table with r, c >= 2")
    if not np.isfinite(table).all():
        raise AnalysisError("ANOVA table has missing cells")
    r, c = table.shape
    grand = table.mean()
    ss_rows = c * ((table.mean(axis=1) - grand) ** 2).sum()
    ss_cols = r * ((table.mean(axis=0) - grand) ** 2).sum()
    ss_total = ((table - grand) ** 2).sum()
    ss_error = ss_total - ss_rows - ss_cols
    df_rows, df_cols = r - 1, c - 1
    df_error = df_rows * df_cols
    ms_error = ss_error / df_error
    if ms_error <= 0:
        f_rows = f_cols = p_rows = p_cols = None
    else:
        f_rows = (ss_rows / df_rows) / ms_error
        f_cols = (ss_cols / df_cols) / ms_error
        p_rows = float(stats.f.sf(f_rows, df_rows, df_error))
        p_cols = float(stats.f.sf(f_cols, df_cols, df_error))
    return AnovaResult(
        ss_rows=float(ss_rows),
        ss_cols=float(ss_cols),
        ss_error=float(ss_error),
        ss_total=float(ss_total),
        df_rows=df_rows,
        df_cols=df_cols,
        df_error=df_error,
        f_rows=f_rows,
        f_cols=f_cols,
        f_crit_rows=float(stats.f.ppf(1.0 - alpha, df_rows, df_error)),
        f_crit_cols=float(stats.f.ppf(1.0 - alpha, df_cols, df_error)),
        p_rows=p_rows,
        p_cols=p_cols,
    )
