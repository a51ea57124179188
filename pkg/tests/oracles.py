"""Independent brute-force oracles the fast implementations are tested against.

Everything here favors obviousness over speed: exact rational arithmetic,
exhaustive enumeration, quadratic pair counting.
"""

from __future__ import annotations

from fractions import Fraction


def oracle_gini(counts) -> Fraction:
    n = sum(counts)
    assert n > 0
    return 1 - sum(Fraction(int(c), n) ** 2 for c in counts)


def _counts(labels, n_classes=3):
    out = [0] * n_classes
    for label in labels:
        out[int(label)] += 1
    return out


def oracle_best_split(rows, labels, min_leaf=1):
    """Enumerate every (feature, midpoint threshold); pick the exact-maximal
    impurity decrease; ties break to lower feature then lower threshold.
    rows: list of tuples of numbers. Returns (feature, threshold: Fraction,
    decrease: Fraction) or None."""
    n = len(rows)
    if n < 2:
        return None
    parent = _counts(labels)
    g_parent = oracle_gini(parent)
    width = len(rows[0])

    best = None
    for feature in range(width):
        values = sorted({Fraction(row[feature]) for row in rows})
        for low, high in zip(values, values[1:]):
            threshold = (low + high) / 2
            left = [i for i in range(n) if Fraction(rows[i][feature]) <= threshold]
            right = [i for i in range(n) if Fraction(rows[i][feature]) > threshold]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            g_left = oracle_gini(_counts(labels[i] for i in left))
            g_right = oracle_gini(_counts(labels[i] for i in right))
            decrease = (
                g_parent
                - Fraction(len(left), n) * g_left
                - Fraction(len(right), n) * g_right
            )
            if decrease <= 0:
                continue
            if best is None or decrease > best[2]:
                best = (feature, threshold, decrease)
    return best


class OracleNode:
    def __init__(self, counts, feature=None, threshold=None, left=None, right=None):
        self.counts = counts
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right


def oracle_tree(rows, labels, max_depth=2, min_samples_split=2, min_leaf=1, depth=0):
    counts = _counts(labels)
    node = OracleNode(counts)
    n = len(rows)
    if n < min_samples_split or max(counts) == n or depth >= max_depth:
        return node
    split = oracle_best_split(rows, labels, min_leaf)
    if split is None:
        return node
    feature, threshold, _ = split
    left_idx = [i for i in range(n) if Fraction(rows[i][feature]) <= threshold]
    right_idx = [i for i in range(n) if i not in set(left_idx)]
    node.feature = feature
    node.threshold = threshold
    node.left = oracle_tree(
        [rows[i] for i in left_idx], [labels[i] for i in left_idx],
        max_depth, min_samples_split, min_leaf, depth + 1,
    )
    node.right = oracle_tree(
        [rows[i] for i in right_idx], [labels[i] for i in right_idx],
        max_depth, min_samples_split, min_leaf, depth + 1,
    )
    return node


def oracle_predict(node: OracleNode, row):
    """(class index with first-wins tie-break, exact probabilities)."""
    while node.feature is not None:
        node = node.left if Fraction(row[node.feature]) <= node.threshold else node.right
    total = sum(node.counts)
    probs = [Fraction(c, total) for c in node.counts]
    best = max(probs)
    return probs.index(best), probs


def mann_whitney_auc(scores, positives) -> Fraction:
    """Concordant-pair fraction over all (positive, negative) pairs, ties
    counted one half."""
    pos = [Fraction(s) for s, p in zip(scores, positives) if p]
    neg = [Fraction(s) for s, p in zip(scores, positives) if not p]
    assert pos and neg
    numerator = Fraction(0)
    for a in pos:
        for b in neg:
            if a > b:
                numerator += 1
            elif a == b:
                numerator += Fraction(1, 2)
    return numerator / (len(pos) * len(neg))


def oracle_average_precision(scores, positives) -> Fraction:
    """Step AP over descending distinct thresholds with grouped ties."""
    pairs = sorted(zip(scores, positives), key=lambda sp: -Fraction(sp[0]))
    n_pos = sum(1 for _, p in pairs if p)
    assert n_pos > 0
    distinct = sorted({Fraction(s) for s, _ in pairs}, reverse=True)
    ap = Fraction(0)
    previous_recall = Fraction(0)
    for threshold in distinct:
        kept = [(s, p) for s, p in pairs if Fraction(s) >= threshold]
        tp = sum(1 for _, p in kept if p)
        recall = Fraction(tp, n_pos)
        precision = Fraction(tp, len(kept))
        ap += (recall - previous_recall) * precision
        previous_recall = recall
    return ap
