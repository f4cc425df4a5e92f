import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapespace import (
    AnalysisError,
    CLASS_ORDER,
    ConfusionMatrix,
    DistanceMatrix,
    anova_two_way,
    cluster_confusion,
    confusion_from_predictions,
    distance_matrix,
    kmedoids,
    knn_classify,
    lda_classify,
    metrics,
    silhouette,
    stratified_folds,
)


def euclidean_dm(X, ids=None):
    X = np.asarray(X, dtype=float)
    d = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
    return DistanceMatrix(ids=ids or [str(i) for i in range(len(X))], d=d)


def blob_data(rng, per_class=40, spread=0.3):
    centers = {"Normal": (0.0, 0.0), "Sickle": (4.0, 0.0), "OtherDeformation": (0.0, 4.0)}
    X, labels = [], []
    for lab, c in centers.items():
        X.append(rng.normal(c, spread, size=(per_class, 2)))
        labels += [lab] * per_class
    return np.vstack(X), labels


class TestFolds:
    def test_stratified_and_balanced(self):
        labels = ["a"] * 10 + ["b"] * 15
        fold_of = stratified_folds(labels, 5, seed=0)
        for lab, count in (("a", 10), ("b", 15)):
            idx = [i for i, l in enumerate(labels) if l == lab]
            sizes = np.bincount(fold_of[idx], minlength=5)
            assert sizes.max() - sizes.min() <= 1

    def test_deterministic_given_seed(self):
        labels = ["a", "b"] * 20
        assert np.array_equal(
            stratified_folds(labels, 4, seed=3), stratified_folds(labels, 4, seed=3)
        )
        assert not np.array_equal(
            stratified_folds(labels, 4, seed=3), stratified_folds(labels, 4, seed=4)
        )

    def test_too_small_class_rejected(self):
        with pytest.raises(AnalysisError, match="fewer"):
            stratified_folds(["a", "a", "b"], 2, seed=0)


class TestKnn:
    def test_separable_blobs_perfect(self):
        rng = np.random.default_rng(0)
        X, labels = blob_data(rng)
        preds = knn_classify(euclidean_dm(X), labels, k=1, folds=5, seed=0)
        assert preds == labels

    def test_k_larger_than_one(self):
        rng = np.random.default_rng(1)
        X, labels = blob_data(rng, spread=0.8)
        preds = knn_classify(euclidean_dm(X), labels, k=5, folds=5, seed=0)
        acc = np.mean([p == l for p, l in zip(preds, labels)])
        assert acc > 0.95

    def test_never_uses_own_fold(self):
        # two interleaved points per fold-mate would be nearest; the
        # out-of-fold rule must still produce a prediction for every item
        labels = ["a"] * 6 + ["b"] * 6
        X = np.array([[i, 0] for i in range(6)] + [[i + 100, 0] for i in range(6)], dtype=float)
        preds = knn_classify(euclidean_dm(X), labels, k=1, folds=3, seed=0)
        assert preds == labels


class TestLda:
    def test_gaussian_blob_oracle(self):
        rng = np.random.default_rng(2)
        X, labels = blob_data(rng, per_class=60)
        preds = lda_classify(X, labels, folds=5, seed=0)
        acc = np.mean([p == l for p, l in zip(preds, labels)])
        assert acc >= 0.99

    def test_degenerate_feature_regularized(self):
        rng = np.random.default_rng(3)
        X, labels = blob_data(rng, per_class=20)
        X = np.column_stack((X[:, 0], X[:, 0]))  # rank-1 pooled covariance
        preds = lda_classify(X, labels, folds=4, seed=0)
        assert len(preds) == len(labels)


class TestKmedoids:
    def test_three_blobs_recovered(self):
        rng = np.random.default_rng(4)
        X, labels = blob_data(rng)
        dm = euclidean_dm(X)
        cr = kmedoids(dm, 3, seed=0)
        cm = cluster_confusion(cr, dict(zip(dm.ids, labels)))
        assert metrics(cm).acc == 100.0

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        X, labels = blob_data(rng, spread=1.0)
        dm = euclidean_dm(X)
        assert kmedoids(dm, 3, seed=0).medoids == kmedoids(dm, 3, seed=0).medoids

    def test_k_out_of_range(self):
        dm = euclidean_dm(np.eye(4))
        with pytest.raises(AnalysisError):
            kmedoids(dm, 1)
        with pytest.raises(AnalysisError):
            kmedoids(dm, 5)

    def test_silhouette_range_and_quality(self):
        rng = np.random.default_rng(6)
        X, _ = blob_data(rng, spread=0.2)
        cr = kmedoids(euclidean_dm(X), 3, seed=0)
        assert 0.8 < cr.asw <= 1.0
        loose = kmedoids(euclidean_dm(X), 5, seed=0)
        assert loose.asw < cr.asw

    def test_contingency_for_other_k(self):
        rng = np.random.default_rng(7)
        X, labels = blob_data(rng)
        dm = euclidean_dm(X)
        cr = kmedoids(dm, 4, seed=0)
        table = cluster_confusion(cr, dict(zip(dm.ids, labels)))
        assert table.shape == (4, 3)
        assert table.sum() == len(labels)


class TestConfusionAndMetrics:
    # held-out reference matrix with a hand-checked score sheet
    REFERENCE = np.array([[202, 0, 0], [0, 194, 16], [1, 8, 202]])

    def test_reference_scores(self):
        rep = metrics(ConfusionMatrix(n=self.REFERENCE))
        assert rep.acc == pytest.approx(100.0 * 598 / 623, abs=1e-9)
        assert rep.sds == pytest.approx(100.0 * 622 / 623, abs=1e-9)
        assert round(rep.sds, 2) == 99.84
        assert round(rep.f1[0], 2) == 99.75

    def test_undefined_entries_are_none(self):
        rep = metrics(ConfusionMatrix(n=[[5, 0, 0], [5, 0, 0], [5, 0, 0]]))
        assert rep.tpr[1] == 0.0
        assert rep.precision[1] is None
        assert rep.f1[1] is None

    def test_from_predictions(self):
        true = [CLASS_ORDER[0], CLASS_ORDER[1], CLASS_ORDER[2], CLASS_ORDER[1]]
        pred = [CLASS_ORDER[0], CLASS_ORDER[2], CLASS_ORDER[2], CLASS_ORDER[1]]
        cm = confusion_from_predictions(true, pred)
        assert cm.n[1, 2] == 1
        assert np.trace(cm.n) == 3

    def test_unknown_label_rejected(self):
        with pytest.raises(AnalysisError, match="unknown"):
            confusion_from_predictions(["Normal"], ["Elliptocyte"])

    @given(
        st.lists(st.integers(min_value=0, max_value=50), min_size=9, max_size=9).filter(
            lambda v: sum(v) > 0
        )
    )
    @settings(max_examples=1000, deadline=None)
    def test_acc_never_exceeds_sds(self, counts):
        rep = metrics(ConfusionMatrix(n=np.array(counts).reshape(3, 3)))
        assert rep.acc <= rep.sds + 1e-12


class TestAnova:
    def test_known_f_ratio(self):
        # hand-computed: SS_rows = 6.25, SS_cols = 2.25, SS_error = 0.25
        table = np.array([[1.0, 2.0], [3.0, 5.0]])
        res = anova_two_way(table)
        assert res.ss_rows == pytest.approx(6.25)
        assert res.ss_cols == pytest.approx(2.25)
        assert res.ss_error == pytest.approx(0.25)
        assert res.f_rows == pytest.approx(25.0)
        assert res.f_cols == pytest.approx(9.0)

    def test_critical_value_df_11(self):
        rng = np.random.default_rng(8)
        table = rng.normal(size=(12, 2))
        res = anova_two_way(table)
        assert res.df_rows == 11
        assert res.df_cols == 1
        assert res.df_error == 11
        # F(0.95; 11, 11)
        assert res.f_crit_rows == pytest.approx(2.818, abs=0.001)

    def test_decomposition_adds_up(self):
        rng = np.random.default_rng(9)
        table = rng.normal(size=(6, 4))
        res = anova_two_way(table)
        assert res.ss_total == pytest.approx(res.ss_rows + res.ss_cols + res.ss_error)

    def test_rejects_bad_tables(self):
        with pytest.raises(AnalysisError):
            anova_two_way(np.ones((1, 5)))
        with pytest.raises(AnalysisError):
            anova_two_way(np.array([[1.0, np.nan], [0.0, 1.0]]))


class TestDistanceMatrix:
    def test_shape_and_symmetry(self, random_curves):
        dm = distance_matrix(random_curves[:6], space="S1", method="fixed")
        assert np.abs(dm.d - dm.d.T).max() == 0.0
        assert np.abs(np.diag(dm.d)).max() == 0.0
        assert dm.meta["space"] == "S1"

    def test_reparam_is_symmetrized(self, random_curves):
        dm = distance_matrix(random_curves[:4], space="S2", method="reparam", shift_step=30)
        assert dm.meta["symmetrized"]
        assert np.abs(dm.d - dm.d.T).max() == 0.0

    def test_unknown_config_rejected(self, random_curves):
        with pytest.raises(AnalysisError):
            distance_matrix(random_curves[:3], space="S3")
