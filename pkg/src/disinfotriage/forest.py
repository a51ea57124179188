"""From-scratch random forest for 3-class domain triage.

Gini-split trees on bootstrap resamples, mean-decrease-impurity feature
importances, prediction by mean leaf class frequency, and a randomized
hyperparameter search over stratified k-fold accuracy.

Split selection is exact: candidate scores are compared as integer
fractions, so ties resolve by the documented (lower feature index, lower
threshold) rule rather than by float rounding luck. Determinism contract:
everything that draws randomness derives from numpy's default_rng seeded
with the caller's seed; tree i uses seed + i, so fits are reproducible
regardless of thread schedule.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .features import Encoder

CLASS_ORDER = ("disinformation", "news", "other")
N_CLASSES = 3

# int64 exactness in best_split needs n**4 < 2**63
MAX_ROWS = 40_000


@dataclass(frozen=True)
class HyperParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    min_leaf: int = 1
    features_per_split: str | int = "sqrt"
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1 or self.min_samples_split < 1 or self.min_leaf < 1:
            raise ValueError("counts must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.min_leaf > self.min_samples_split:
            raise ValueError("min_leaf must not exceed min_samples_split")
        if isinstance(self.features_per_split, str):
            if self.features_per_split not in ("sqrt", "log2", "all"):
                raise ValueError("features_per_split must be sqrt, log2, all, or a count")
        elif self.features_per_split < 1:
            raise ValueError("features_per_split count must be >= 1")

    def subset_size(self, width: int) -> int:
        if self.features_per_split == "sqrt":
            return max(1, int(np.sqrt(width)))
        if self.features_per_split == "log2":
            return max(1, int(np.log2(width))) if width > 1 else 1
        if self.features_per_split == "all":
            return width
        return min(width, int(self.features_per_split))


class TreeNode:
    """Internal nodes keep their class counts too, so decision paths can be
    attributed without re-touching training data. x[feature] <= threshold
    routes left."""

    __slots__ = ("class_counts", "feature_index", "threshold", "left", "right")

    def __init__(self, class_counts, feature_index=None, threshold=None, left=None, right=None):
        self.class_counts = tuple(int(c) for c in class_counts)
        self.feature_index = feature_index
        self.threshold = threshold
        self.left = left
        self.right = right

    @property
    def is_leaf(self) -> bool:
        return self.feature_index is None

    def probabilities(self) -> np.ndarray:
        counts = np.asarray(self.class_counts, dtype=np.float64)
        return counts / counts.sum()


@dataclass
class Forest:
    trees: list[TreeNode]
    params: HyperParams
    seed: int
    n_features: int
    class_order: tuple[str, ...] = CLASS_ORDER
    encoder: Encoder | None = None
    feature_mask: frozenset[int] | None = None
    _flat: list | None = field(default=None, repr=False, compare=False)


def gini(class_counts: Sequence[int]) -> float:
    """1 - sum((c/n)^2); 0 for a pure node, at most 2/3 for 3 classes."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if (counts < 0).any():
        raise ValueError("negative class count")
    n = counts.sum()
    if n == 0:
        raise ValueError("empty node has no impurity")
    p = counts / n
    return float(1.0 - (p * p).sum())


def best_split(
    rows: np.ndarray,
    labels: np.ndarray,
    candidate_features: Iterable[int],
    min_leaf: int = 1,
) -> tuple[int, float, float] | None:
    """Best (feature, threshold, impurity_decrease) over midpoint thresholds.

    Maximizes weighted impurity decrease, which for fixed parent counts is
    equivalent to maximizing S = sum(left^2)/n_left + sum(right^2)/n_right.
    S is compared exactly as the integer fraction
    (sumL*nR + sumR*nL) / (nL*nR): floats shortlist the near-best
    candidates, integers decide. Ties break to the lower feature index,
    then the lower threshold. Returns None when no legal split strictly
    decreases impurity.
    """
    rows = np.asarray(rows, dtype=np.float64)
    labels = np.asarray(labels)
    if rows.shape[0] < 2:
        return None

    if isinstance(candidate_features, np.ndarray):
        feats = np.unique(candidate_features.astype(np.intp, copy=False))
    else:
        feats = np.unique(np.asarray(list(candidate_features), dtype=np.intp))
    if feats.size == 0:
        return None

    found = _scan_splits(rows[:, feats], labels, min_leaf)
    if found is None:
        return None
    column, threshold, decrease = found
    return int(feats[column]), threshold, decrease


def _scan_splits(
    X: np.ndarray, labels: np.ndarray, min_leaf: int
) -> tuple[int, float, float] | None:
    """best_split over a pre-sliced candidate-column matrix.

    Returns (column index into X, threshold, impurity decrease) or None.
    """
    n = X.shape[0]
    if n > MAX_ROWS:
        raise ValueError(f"more than {MAX_ROWS} rows would overflow exact scoring")

    order = np.argsort(X, axis=0, kind="stable")
    Xs = np.take_along_axis(X, order, axis=0)

    onehot = labels[:, None] == np.arange(N_CLASSES)  # (n, 3)
    cum = onehot[order].cumsum(axis=0, dtype=np.int64)  # (n, m, 3)
    parent = np.bincount(labels, minlength=N_CLASSES).astype(np.int64)
    p2 = int((parent**2).sum())

    left = cum[:-1]  # boundary i keeps rows [0..i] on the left
    right = cum[-1][None, :, :] - left
    n_left = np.arange(1, n, dtype=np.int64)[:, None]
    n_right = n - n_left
    sum_left = np.einsum("ijk,ijk->ij", left, left)
    sum_right = np.einsum("ijk,ijk->ij", right, right)
    num = sum_left * n_right + sum_right * n_left
    den = n_left * n_right

    valid = Xs[:-1] < Xs[1:]
    valid &= (n_left >= min_leaf) & (n_right >= min_leaf)
    valid &= num * n > p2 * den  # strict impurity decrease, exact
    if not valid.any():
        return None

    score = np.where(valid, num / den, -np.inf)
    top = score.max()
    near = valid & (score >= top - 1e-9 * max(1.0, abs(top)))
    candidates = np.argwhere(near)
    # tie-break order: feature index ascending, then threshold ascending
    candidates = candidates[np.lexsort((candidates[:, 0], candidates[:, 1]))]

    best = None  # (num, den, column, boundary)
    for i, j in candidates:
        c_num, c_den = int(num[i, j]), int(den[i, 0])
        if best is None or c_num * best[1] > best[0] * c_den:
            best = (c_num, c_den, int(j), int(i))

    b_num, b_den, j, i = best
    threshold = float((Xs[i, j] + Xs[i + 1, j]) / 2.0)
    decrease = (b_num / b_den - p2 / n) / n
    return j, threshold, float(decrease)


def _grow_tree(X: np.ndarray, y: np.ndarray, params: HyperParams, rng: np.random.Generator) -> TreeNode:
    width = X.shape[1]
    subset = params.subset_size(width)
    root = TreeNode(np.bincount(y, minlength=N_CLASSES))
    # explicit stack instead of recursion: unbounded depth must not hit the
    # interpreter's recursion limit
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        counts = np.asarray(node.class_counts)
        n = idx.size
        if (
            n < params.min_samples_split
            or counts.max() == n
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            continue
        if subset < width:
            feats = np.sort(rng.choice(width, size=subset, replace=False))
        else:
            feats = np.arange(width)
        split = _scan_splits(X[np.ix_(idx, feats)], y[idx], params.min_leaf)
        if split is None:
            continue
        column, threshold, _ = split
        feature = int(feats[column])
        node.feature_index = feature
        node.threshold = threshold
        goes_left = X[idx, feature] <= threshold
        left_idx, right_idx = idx[goes_left], idx[~goes_left]
        node.left = TreeNode(np.bincount(y[left_idx], minlength=N_CLASSES))
        node.right = TreeNode(np.bincount(y[right_idx], minlength=N_CLASSES))
        stack.append((node.left, left_idx, depth + 1))
        stack.append((node.right, right_idx, depth + 1))
    return root


def _as_label_array(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.dtype.kind in "UO":
        index = {name: i for i, name in enumerate(CLASS_ORDER)}
        return np.array([index[str(l)] for l in labels], dtype=np.intp)
    return labels.astype(np.intp)


def fit_forest(matrix: np.ndarray, labels, params: HyperParams, seed: int = 0) -> Forest:
    """Train n_trees Gini trees on bootstrap resamples.

    Tree i draws its bootstrap sample and feature subsets from
    default_rng(seed + i), so the result is identical whether trees are
    fitted serially or in parallel.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    y = _as_label_array(labels)
    n = matrix.shape[0]
    if n != y.size:
        raise ValueError("matrix rows and labels disagree")
    if n < params.min_samples_split:
        raise ValueError("fewer rows than min_samples_split")

    def one_tree(index: int) -> TreeNode:
        rng = np.random.default_rng(seed + index)
        if params.bootstrap:
            sample = rng.integers(0, n, size=n)
            return _grow_tree(matrix[sample], y[sample], params, rng)
        return _grow_tree(matrix, y, params, rng)

    if params.n_trees >= 4 and n >= 64:
        workers = min(8, os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(one_tree, range(params.n_trees)))
    else:
        trees = [one_tree(i) for i in range(params.n_trees)]

    return Forest(trees=trees, params=params, seed=seed, n_features=matrix.shape[1])


# --- prediction ------------------------------------------------------------

def _flatten(root: TreeNode):
    feature, threshold, left, right, probs = [], [], [], [], []
    stack = [(root, -1, False)]
    while stack:
        node, parent, is_right = stack.pop()
        i = len(feature)
        if parent >= 0:
            (right if is_right else left)[parent] = i
        feature.append(-1 if node.is_leaf else node.feature_index)
        threshold.append(0.0 if node.is_leaf else node.threshold)
        left.append(-1)
        right.append(-1)
        probs.append(node.probabilities())
        if not node.is_leaf:
            stack.append((node.right, i, True))
            stack.append((node.left, i, False))
    return (
        np.array(feature, dtype=np.intp),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.intp),
        np.array(right, dtype=np.intp),
        np.stack(probs),
    )


def _flat_trees(forest: Forest):
    if forest._flat is None or len(forest._flat) != len(forest.trees):
        forest._flat = [_flatten(t) for t in forest.trees]
    return forest._flat


def predict_proba(forest: Forest, rows: np.ndarray) -> np.ndarray:
    """Mean leaf class frequency across trees; rows (n,d) -> (n,3), a single
    row (d,) -> (3,)."""
    rows = np.asarray(rows, dtype=np.float64)
    single = rows.ndim == 1
    if single:
        rows = rows[None, :]
    if rows.shape[1] != forest.n_features:
        raise ValueError(f"row width {rows.shape[1]} != forest width {forest.n_features}")

    out = np.zeros((rows.shape[0], N_CLASSES), dtype=np.float64)
    for feature, threshold, left, right, probs in _flat_trees(forest):
        idx = np.zeros(rows.shape[0], dtype=np.intp)
        pending = feature[idx] >= 0
        while pending.any():
            active = idx[pending]
            f = feature[active]
            go_left = rows[pending, f] <= threshold[active]
            idx[pending] = np.where(go_left, left[active], right[active])
            pending = feature[idx] >= 0
        out += probs[idx]
    out /= len(forest.trees)
    return out[0] if single else out


def predict(forest: Forest, rows: np.ndarray) -> np.ndarray:
    """Class names; argmax ties resolve to the first class in class_order."""
    proba = predict_proba(forest, rows)
    if proba.ndim == 1:
        return np.array(forest.class_order[int(np.argmax(proba))])
    return np.array([forest.class_order[i] for i in np.argmax(proba, axis=1)])


# --- importances -------------------------------------------------------------

def raw_importances(forest: Forest) -> np.ndarray:
    """Mean decrease impurity per encoded column, normalized to sum 1."""
    total = np.zeros(forest.n_features, dtype=np.float64)
    for root in forest.trees:
        n_root = sum(root.class_counts)
        stack = [root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                continue
            n = sum(node.class_counts)
            n_l = sum(node.left.class_counts)
            n_r = sum(node.right.class_counts)
            decrease = gini(node.class_counts) - (
                n_l / n * gini(node.left.class_counts) + n_r / n * gini(node.right.class_counts)
            )
            total[node.feature_index] += (n / n_root) * decrease
            stack.append(node.left)
            stack.append(node.right)
    total /= len(forest.trees)
    s = total.sum()
    return total / s if s > 0 else total


def feature_importance(forest: Forest) -> dict:
    """Importance folded to source features when an encoder is attached,
    otherwise keyed by encoded column index."""
    raw = raw_importances(forest)
    # masked forests index into the kept columns, in sorted order
    kept = sorted(forest.feature_mask) if forest.feature_mask is not None else None
    if forest.encoder is None:
        return {(kept[i] if kept is not None else i): float(v) for i, v in enumerate(raw)}
    folded: dict[str, float] = {}
    for column, value in enumerate(raw):
        source = forest.encoder.source_of(kept[column] if kept is not None else column)
        folded[source] = folded.get(source, 0.0) + float(value)
    return folded


# --- hyperparameter search ---------------------------------------------------

DEFAULT_SEARCH_SPACE: dict[str, Any] = {
    "n_trees": list(range(50, 501)),
    "max_depth": list(range(4, 33)) + [None],
    "min_samples_split": list(range(2, 17)),
    "min_leaf": list(range(1, 9)),
    "features_per_split": ["sqrt", "log2"],
}


def _sample_params(space: dict[str, Any], rng: np.random.Generator) -> HyperParams:
    def pick(name, default):
        values = space.get(name, [default])
        return values[int(rng.integers(len(values)))]

    n_trees = pick("n_trees", 100)
    max_depth = pick("max_depth", None)
    min_samples_split = pick("min_samples_split", 2)
    features = pick("features_per_split", "sqrt")
    leaf_values = [v for v in space.get("min_leaf", [1]) if v <= min_samples_split] or [1]
    min_leaf = leaf_values[int(rng.integers(len(leaf_values)))]
    return HyperParams(
        n_trees=n_trees,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
        min_leaf=min_leaf,
        features_per_split=features,
    )


def random_search(
    matrix: np.ndarray,
    labels,
    space: dict[str, Any] | None = None,
    iters: int = 250,
    folds: int = 5,
    seed: int = 0,
) -> tuple[HyperParams, float]:
    """Sample `iters` settings; score each by mean stratified k-fold
    accuracy; return the maximizer (earlier iteration wins ties)."""
    from .evaluate import kfold_pairs

    if iters < 1:
        raise ValueError("iters must be >= 1")
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if space is None:
        space = DEFAULT_SEARCH_SPACE

    matrix = np.asarray(matrix, dtype=np.float64)
    y = _as_label_array(labels)
    splits = kfold_pairs(y, folds, seed=seed)
    rng = np.random.default_rng(seed)

    best: tuple[HyperParams, float] | None = None
    for _ in range(iters):
        params = _sample_params(space, rng)
        fit_seed = int(rng.integers(2**31 - 1))
        correct = 0
        for fold, (train_idx, test_idx) in enumerate(splits):
            forest = fit_forest(matrix[train_idx], y[train_idx], params, seed=fit_seed + fold)
            proba = predict_proba(forest, matrix[test_idx])
            predicted = np.argmax(proba, axis=1)
            correct += int((predicted == y[test_idx]).sum())
        accuracy = correct / y.size
        if best is None or accuracy > best[1]:
            best = (params, accuracy)
    return best


# --- serialization -----------------------------------------------------------

def tree_to_dict(node: TreeNode) -> dict[str, Any]:
    out: dict[str, Any] = {"counts": list(node.class_counts)}
    if not node.is_leaf:
        out["feature"] = node.feature_index
        out["threshold"] = node.threshold
        out["left"] = tree_to_dict(node.left)
        out["right"] = tree_to_dict(node.right)
    return out


def tree_from_dict(data: dict[str, Any]) -> TreeNode:
    node = TreeNode(data["counts"])
    if "feature" in data:
        node.feature_index = int(data["feature"])
        node.threshold = float(data["threshold"])
        node.left = tree_from_dict(data["left"])
        node.right = tree_from_dict(data["right"])
    return node


def forest_to_dict(forest: Forest) -> dict[str, Any]:
    params = forest.params
    return {
        "class_order": list(forest.class_order),
        "seed": forest.seed,
        "n_features": forest.n_features,
        "params": {
            "n_trees": params.n_trees,
            "max_depth": params.max_depth,
            "min_samples_split": params.min_samples_split,
            "min_leaf": params.min_leaf,
            "features_per_split": params.features_per_split,
            "bootstrap": params.bootstrap,
        },
        "feature_mask": sorted(forest.feature_mask) if forest.feature_mask is not None else None,
        "encoder": forest.encoder.to_dict() if forest.encoder is not None else None,
        "trees": [tree_to_dict(t) for t in forest.trees],
    }


def forest_from_dict(data: dict[str, Any]) -> Forest:
    mask = data.get("feature_mask")
    encoder = data.get("encoder")
    return Forest(
        trees=[tree_from_dict(t) for t in data["trees"]],
        params=HyperParams(**data["params"]),
        seed=int(data["seed"]),
        n_features=int(data["n_features"]),
        class_order=tuple(data["class_order"]),
        encoder=Encoder.from_dict(encoder) if encoder is not None else None,
        feature_mask=frozenset(mask) if mask is not None else None,
    )
