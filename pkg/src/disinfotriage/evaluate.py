"""Evaluation toolkit: stratified folds, one-vs-rest ROC/PR, CV reports.

Tied scores are grouped into a single threshold step, which makes the
trapezoidal ROC-AUC equal the Mann-Whitney concordant-pair fraction with
ties counted one half.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .forest import CLASS_ORDER, N_CLASSES, HyperParams, fit_forest, predict_proba


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    x: float  # FPR for ROC, recall for PR
    y: float  # TPR for ROC, precision for PR


def kfold_split(labels, k: int, seed: int = 0) -> list[np.ndarray]:
    """k disjoint stratified index sets covering every row.

    Each class is shuffled with the seeded generator and dealt round-robin,
    so per-class fold sizes differ by at most one.
    """
    y = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if idx.size < k:
            raise ValueError(f"class {cls!r} has {idx.size} members, fewer than k={k}")
        for position, i in enumerate(rng.permutation(idx)):
            folds[position % k].append(int(i))
    return [np.array(sorted(f), dtype=np.intp) for f in folds]


def kfold_pairs(labels, k: int, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """(train, test) index pairs from kfold_split folds."""
    y = np.asarray(labels)
    everything = np.arange(y.size, dtype=np.intp)
    return [(np.setdiff1d(everything, fold), fold) for fold in kfold_split(y, k, seed)]


def _threshold_steps(scores: np.ndarray, positives: np.ndarray):
    """Cumulative (threshold, tp, fp) at each distinct score, descending."""
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    p = positives[order]
    boundaries = np.flatnonzero(np.diff(s) != 0)
    ends = np.append(boundaries, s.size - 1)  # last index of each tie group
    tp_cum = np.cumsum(p)[ends]
    fp_cum = np.cumsum(~p)[ends]
    return s[ends], tp_cum, fp_cum


def roc_auc(scores, positives) -> tuple[list[CurvePoint], float]:
    """ROC curve over distinct thresholds plus trapezoidal AUC."""
    s = np.asarray(scores, dtype=np.float64)
    p = np.asarray(positives, dtype=bool)
    n_pos = int(p.sum())
    n_neg = p.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative")

    thresholds, tp, fp = _threshold_steps(s, p)
    fpr = fp / n_neg
    tpr = tp / n_pos
    curve = [CurvePoint(float(t), float(x), float(y)) for t, x, y in zip(thresholds, fpr, tpr)]
    xs = np.concatenate(([0.0], fpr))
    ys = np.concatenate(([0.0], tpr))
    auc = float(np.trapezoid(ys, xs))
    return curve, auc


def pr_auc(scores, positives) -> tuple[list[CurvePoint], float]:
    """PR curve plus step-wise average precision sum((R_i - R_{i-1}) * P_i)."""
    s = np.asarray(scores, dtype=np.float64)
    p = np.asarray(positives, dtype=bool)
    n_pos = int(p.sum())
    if n_pos == 0:
        raise ValueError("average precision needs at least one positive")

    thresholds, tp, fp = _threshold_steps(s, p)
    recall = tp / n_pos
    precision = tp / (tp + fp)
    curve = [
        CurvePoint(float(t), float(r), float(pr))
        for t, r, pr in zip(thresholds, recall, precision)
    ]
    previous = np.concatenate(([0.0], recall[:-1]))
    ap = float(np.sum((recall - previous) * precision))
    return curve, ap


@dataclass
class EvalReport:
    class_order: tuple[str, ...]
    folds: int
    # per class name
    roc_auc_mean: dict[str, float]
    roc_auc_std: dict[str, float]
    pr_auc_mean: dict[str, float]
    pr_auc_std: dict[str, float]
    pooled_roc_auc: dict[str, float]
    pooled_pr_auc: dict[str, float]
    precision: dict[str, float]
    recall: dict[str, float]
    confusion: list[list[int]]  # rows = true class, columns = predicted
    accuracy: float
    curves: dict[str, dict[str, list[CurvePoint]]]  # class -> {"roc"|"pr": points}

    def to_dict(self) -> dict[str, Any]:
        return {
            "class_order": list(self.class_order),
            "folds": self.folds,
            "roc_auc_mean": self.roc_auc_mean,
            "roc_auc_std": self.roc_auc_std,
            "pr_auc_mean": self.pr_auc_mean,
            "pr_auc_std": self.pr_auc_std,
            "pooled_roc_auc": self.pooled_roc_auc,
            "pooled_pr_auc": self.pooled_pr_auc,
            "precision": self.precision,
            "recall": self.recall,
            "confusion": self.confusion,
            "accuracy": self.accuracy,
        }


def evaluate_cv(matrix, labels, params: HyperParams, k: int = 5, seed: int = 0) -> EvalReport:
    """Stratified k-fold evaluation: per-fold one-vs-rest AUCs with mean and
    std, pooled curves over all held-out scores, and an aggregated
    confusion matrix from argmax predictions."""
    from .forest import _as_label_array

    matrix = np.asarray(matrix, dtype=np.float64)
    y = _as_label_array(labels)

    per_fold_roc: dict[str, list[float]] = {c: [] for c in CLASS_ORDER}
    per_fold_pr: dict[str, list[float]] = {c: [] for c in CLASS_ORDER}
    pooled_scores: list[np.ndarray] = []
    pooled_truth: list[np.ndarray] = []
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)

    for fold, (train_idx, test_idx) in enumerate(kfold_pairs(y, k, seed)):
        forest = fit_forest(matrix[train_idx], y[train_idx], params, seed=seed + fold)
        proba = predict_proba(forest, matrix[test_idx])
        truth = y[test_idx]
        pooled_scores.append(proba)
        pooled_truth.append(truth)
        for ci, cname in enumerate(CLASS_ORDER):
            _, auc = roc_auc(proba[:, ci], truth == ci)
            per_fold_roc[cname].append(auc)
            _, ap = pr_auc(proba[:, ci], truth == ci)
            per_fold_pr[cname].append(ap)
        predicted = np.argmax(proba, axis=1)
        for t, pclass in zip(truth, predicted):
            confusion[t, pclass] += 1

    scores = np.vstack(pooled_scores)
    truth = np.concatenate(pooled_truth)
    pooled_roc: dict[str, float] = {}
    pooled_pr: dict[str, float] = {}
    curves: dict[str, dict[str, list[CurvePoint]]] = {}
    for ci, cname in enumerate(CLASS_ORDER):
        roc_curve, auc = roc_auc(scores[:, ci], truth == ci)
        pr_curve, ap = pr_auc(scores[:, ci], truth == ci)
        pooled_roc[cname] = auc
        pooled_pr[cname] = ap
        curves[cname] = {"roc": roc_curve, "pr": pr_curve}

    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    for ci, cname in enumerate(CLASS_ORDER):
        col = confusion[:, ci].sum()
        row = confusion[ci, :].sum()
        precision[cname] = float(confusion[ci, ci] / col) if col else 0.0
        recall[cname] = float(confusion[ci, ci] / row) if row else 0.0

    return EvalReport(
        class_order=CLASS_ORDER,
        folds=k,
        roc_auc_mean={c: float(np.mean(v)) for c, v in per_fold_roc.items()},
        roc_auc_std={c: float(np.std(v)) for c, v in per_fold_roc.items()},
        pr_auc_mean={c: float(np.mean(v)) for c, v in per_fold_pr.items()},
        pr_auc_std={c: float(np.std(v)) for c, v in per_fold_pr.items()},
        pooled_roc_auc=pooled_roc,
        pooled_pr_auc=pooled_pr,
        precision=precision,
        recall=recall,
        confusion=confusion.tolist(),
        accuracy=float(np.trace(confusion) / confusion.sum()),
        curves=curves,
    )


def export_curves(report: EvalReport, directory: str | Path) -> list[Path]:
    """Write plot-ready CSVs: one file per class and curve kind."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for cname, kinds in report.curves.items():
        for kind, points in kinds.items():
            path = directory / f"{kind}_{cname}.csv"
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["threshold", "x", "y"])
                for point in points:
                    writer.writerow([point.threshold, point.x, point.y])
            written.append(path)
    return written
