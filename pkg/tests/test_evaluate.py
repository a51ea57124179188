import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from disinfotriage.evaluate import (
    EvalReport,
    evaluate_cv,
    export_curves,
    kfold_pairs,
    kfold_split,
    pr_auc,
    roc_auc,
)
from disinfotriage.forest import HyperParams


class TestKfold:
    def test_two_classes_five_folds(self):
        labels = np.array([0, 1] * 5)
        folds = kfold_split(labels, 5, seed=0)
        assert len(folds) == 5
        for fold in folds:
            assert fold.size == 2
            assert sorted(labels[fold]) == [0, 1]

    def test_disjoint_and_covering(self):
        labels = np.array([0] * 9 + [1] * 8 + [2] * 7)
        folds = kfold_split(labels, 4, seed=3)
        combined = np.concatenate(folds)
        assert sorted(combined) == list(range(24))

    def test_fold_sizes_differ_by_at_most_one_per_class(self):
        labels = np.array([0] * 11 + [1] * 7)
        folds = kfold_split(labels, 3, seed=1)
        for cls in (0, 1):
            sizes = [int((labels[f] == cls).sum()) for f in folds]
            assert max(sizes) - min(sizes) <= 1

    def test_same_seed_same_folds(self):
        labels = np.array([0, 1, 2] * 6)
        a = kfold_split(labels, 3, seed=9)
        b = kfold_split(labels, 3, seed=9)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_singleton_class_rejected(self):
        labels = np.array([0, 0, 1])
        with pytest.raises(ValueError):
            kfold_split(labels, 2, seed=0)

    def test_pairs_disjoint(self):
        labels = np.array([0, 1, 2] * 5)
        for train, test in kfold_pairs(labels, 3, seed=2):
            assert np.intersect1d(train, test).size == 0
            assert train.size + test.size == 15


class TestRocAuc:
    def test_perfect_separation(self):
        _, auc = roc_auc([0.9, 0.8, 0.2, 0.1], [True, True, False, False])
        assert auc == 1.0

    def test_three_quarters(self):
        _, auc = roc_auc([0.9, 0.8, 0.7, 0.6], [True, False, True, False])
        assert abs(auc - 0.75) < 1e-9

    def test_all_scores_equal(self):
        curve, auc = roc_auc([0.5] * 6, [True, False, True, False, True, False])
        assert abs(auc - 0.5) < 1e-9
        assert len(curve) == 1  # single grouped threshold step

    def test_one_class_rejected(self):
        with pytest.raises(ValueError):
            roc_auc([0.1, 0.2], [True, True])

    def test_curve_monotone(self):
        rng = np.random.default_rng(5)
        scores = rng.random(50)
        positives = rng.random(50) < 0.4
        curve, _ = roc_auc(scores, positives)
        xs = [p.x for p in curve]
        ys = [p.y for p in curve]
        assert xs == sorted(xs)
        assert ys == sorted(ys)
        thresholds = [p.threshold for p in curve]
        assert thresholds == sorted(thresholds, reverse=True)

    @given(st.data())
    @settings(max_examples=150, deadline=None)
    def test_mann_whitney_identity(self, data):
        n = data.draw(st.integers(min_value=2, max_value=60))
        # quantized scores force plenty of ties
        scores = data.draw(st.lists(st.integers(0, 9), min_size=n, max_size=n))
        positives = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
        if not (any(positives) and not all(positives)):
            return
        _, auc = roc_auc([s / 10 for s in scores], positives)
        expected = oracles.mann_whitney_auc([s / 10 for s in scores], positives)
        assert abs(auc - float(expected)) < 1e-9

    def test_mann_whitney_identity_large(self):
        rng = np.random.default_rng(13)
        scores = np.round(rng.random(1000), 2)  # two decimals: many ties
        positives = rng.random(1000) < 0.3
        _, auc = roc_auc(scores, positives)
        expected = oracles.mann_whitney_auc(
            [float(s) for s in scores], [bool(p) for p in positives]
        )
        assert abs(auc - float(expected)) < 1e-9


class TestPrAuc:
    def test_perfect_ranking(self):
        _, ap = pr_auc([0.9, 0.8, 0.2, 0.1], [True, True, False, False])
        assert abs(ap - 1.0) < 1e-9

    def test_single_positive_rank_two(self):
        _, ap = pr_auc([0.9, 0.8, 0.7], [False, True, False])
        assert abs(ap - 0.5) < 1e-9

    def test_all_positives(self):
        _, ap = pr_auc([0.3, 0.9], [True, True])
        assert abs(ap - 1.0) < 1e-9

    def test_no_positives_rejected(self):
        with pytest.raises(ValueError):
            pr_auc([0.3, 0.9], [False, False])

    @given(st.data())
    @settings(max_examples=150, deadline=None)
    def test_matches_step_oracle(self, data):
        n = data.draw(st.integers(min_value=1, max_value=40))
        scores = data.draw(st.lists(st.integers(0, 9), min_size=n, max_size=n))
        positives = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
        if not any(positives):
            return
        _, ap = pr_auc([s / 10 for s in scores], positives)
        expected = oracles.oracle_average_precision([s / 10 for s in scores], positives)
        assert abs(ap - float(expected)) < 1e-9


def separable_dataset(per_class=30, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([
        rng.normal(0, 0.6, size=(per_class, 4)),
        rng.normal(3, 0.6, size=(per_class, 4)),
        rng.normal(6, 0.6, size=(per_class, 4)),
    ])
    y = np.repeat([0, 1, 2], per_class)
    return X, y


class TestEvaluateCv:
    def test_separable_high_auc(self):
        X, y = separable_dataset()
        report = evaluate_cv(X, y, HyperParams(n_trees=20, max_depth=8), k=3, seed=0)
        for cname in report.class_order:
            assert report.roc_auc_mean[cname] >= 0.95

    def test_confusion_totals(self):
        X, y = separable_dataset()
        report = evaluate_cv(X, y, HyperParams(n_trees=10, max_depth=6), k=3, seed=1)
        confusion = np.array(report.confusion)
        assert confusion.sum() == y.size
        # row sums equal per-class support
        assert confusion.sum(axis=1).tolist() == [30, 30, 30]

    def test_deterministic(self):
        X, y = separable_dataset(per_class=15, seed=2)
        a = evaluate_cv(X, y, HyperParams(n_trees=6, max_depth=5), k=3, seed=4)
        b = evaluate_cv(X, y, HyperParams(n_trees=6, max_depth=5), k=3, seed=4)
        assert a.to_dict() == b.to_dict()

    def test_shuffled_labels_near_chance(self):
        rng = np.random.default_rng(6)
        X, y = separable_dataset(per_class=25, seed=6)
        shuffled = rng.permutation(y)
        report = evaluate_cv(X, shuffled, HyperParams(n_trees=10, max_depth=6), k=3, seed=6)
        for cname in report.class_order:
            assert 0.3 <= report.roc_auc_mean[cname] <= 0.7

    def test_rates_in_unit_interval(self):
        X, y = separable_dataset(per_class=12, seed=7)
        report = evaluate_cv(X, y, HyperParams(n_trees=5, max_depth=4), k=3, seed=7)
        for pool in (report.precision, report.recall, report.pooled_roc_auc, report.pooled_pr_auc):
            for value in pool.values():
                assert 0.0 <= value <= 1.0

    def test_export_curves(self, tmp_path):
        X, y = separable_dataset(per_class=12, seed=8)
        report = evaluate_cv(X, y, HyperParams(n_trees=5, max_depth=4), k=3, seed=8)
        written = export_curves(report, tmp_path)
        assert len(written) == 6  # 3 classes x {roc, pr}
        for path in written:
            header = path.read_text().splitlines()[0]
            assert header == "threshold,x,y"
