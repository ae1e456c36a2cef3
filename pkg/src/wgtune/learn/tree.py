"""CART trees on dense float matrices.

Splits are binary ``x[feature] <= threshold`` tests where the threshold is
always a training value (the largest value sent left). Split selection
therefore depends only on the ordering of each column, which makes trees
invariant under strictly increasing transforms of a feature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GINI = "gini"
VARIANCE = "variance"


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # class counts (n_nodes, n_classes) or means (n_nodes,)

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                return node
            a = rows[active]
            na = node[active]
            go_left = X[a, f[active]] <= self.threshold[na]
            node[a] = np.where(go_left, self.left[na], self.right[na])

    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def to_nested(self, i: int = 0, leaf=lambda v: v) -> dict:
        if self.feature[i] < 0:
            return {"leaf": leaf(self.value[i])}
        return {
            "feature": int(self.feature[i]),
            "threshold": float(self.threshold[i]),
            "left": self.to_nested(int(self.left[i]), leaf),
            "right": self.to_nested(int(self.right[i]), leaf),
        }

    @classmethod
    def from_nested(cls, doc: dict, leaf=lambda v: v) -> "Tree":
        feature, threshold, left, right, value = [], [], [], [], []

        def visit(node):
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(None)
            if "leaf" in node:
                value[i] = leaf(node["leaf"])
                return i
            feature[i] = int(node["feature"])
            threshold[i] = float(node["threshold"])
            left[i] = visit(node["left"])
            right[i] = visit(node["right"])
            return i

        visit(doc)
        leaves = [v for v in value if v is not None]
        template = np.zeros_like(np.asarray(leaves[0], dtype=float))
        vals = np.array([template if v is None else np.asarray(v, dtype=float) for v in value])
        return cls(
            np.array(feature, dtype=np.int64),
            np.array(threshold, dtype=float),
            np.array(left, dtype=np.int64),
            np.array(right, dtype=np.int64),
            vals,
        )


def gini(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


def _best_split(Xs: np.ndarray, y: np.ndarray, criterion: str, min_leaf: int):
    """Best split over the columns of ``Xs`` (n x m).

    Returns ``(column, threshold, score)`` or ``None``. Lower score is better;
    ties go to the lowest column, then the lowest threshold.
    """
    n, m = Xs.shape
    if n < 2 * min_leaf:
        return None
    order = np.argsort(Xs, axis=0, kind="stable")
    xs = np.take_along_axis(Xs, order, axis=0)
    # candidate split after sorted position i: left = [0..i], right = [i+1..n)
    lo, hi = min_leaf - 1, n - min_leaf  # i in [lo, hi)
    valid = xs[lo:hi] < xs[lo + 1 : hi + 1]
    if not valid.any():
        return None
    n_left = np.arange(lo + 1, hi + 1, dtype=float)[:, None]
    n_right = n - n_left
    if criterion == VARIANCE:
        yc = y - y.mean()
        ys = yc[order]
        s = np.cumsum(ys, axis=0)[lo:hi]
        total = yc.sum()
        # minimising SSE is maximising sum^2/n over both children
        score = -(s * s / n_left + (total - s) ** 2 / n_right)
    else:
        onehot = y  # (n, k) class indicator matrix
        ys = onehot[order]  # (n, m, k)
        c = np.cumsum(ys, axis=0)[lo:hi]
        tot = onehot.sum(axis=0)
        score = -((c * c).sum(axis=2) / n_left + ((tot - c) ** 2).sum(axis=2) / n_right)
    score = np.where(valid, score, np.inf)
    flat = np.argmin(score.T)  # column-major: lowest column first, then lowest position
    col, pos = divmod(int(flat), score.shape[0])
    if not np.isfinite(score[pos, col]):
        return None
    return col, float(xs[lo + pos, col]), float(score[pos, col])


def build_tree(X, y, criterion, *, max_depth=16, min_leaf=1, max_features=None, rng=None, n_classes=None) -> Tree:
    """Grow a tree depth-first.

    ``y`` holds class indices for ``gini`` and real targets for ``variance``.
    ``max_features`` columns are drawn per node (all when ``None``).
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if criterion == GINI:
        y = np.asarray(y, dtype=np.int64)
        k = n_classes if n_classes is not None else int(y.max()) + 1
        target = np.eye(k)[y]
    else:
        target = np.asarray(y, dtype=float)
    n_feat = d if max_features is None else max(1, min(d, int(max_features)))

    feature, threshold, left, right, value = [], [], [], [], []

    def leaf_value(idx):
        if criterion == GINI:
            return target[idx].sum(axis=0)
        return float(target[idx].mean())

    def pure(idx):
        t = target[idx]
        return bool(np.all(t == t[0]))

    stack = [(np.arange(n), 0, None, None)]
    while stack:
        idx, depth, parent, is_left = stack.pop()
        i = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(leaf_value(idx))
        if parent is not None:
            (left if is_left else right)[parent] = i
        if depth >= max_depth or idx.size < 2 * min_leaf or pure(idx):
            continue
        if n_feat < d:
            cols = np.sort(rng.choice(d, size=n_feat, replace=False))
        else:
            cols = np.arange(d)
        found = _best_split(X[np.ix_(idx, cols)], target[idx], criterion, min_leaf)
        if found is None:
            continue
        col, thr, _ = found
        f = int(cols[col])
        feature[i] = f
        threshold[i] = thr
        mask = X[idx, f] <= thr
        # push right first so the left subtree is numbered first
        stack.append((idx[~mask], depth + 1, i, False))
        stack.append((idx[mask], depth + 1, i, True))

    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=float),
    )
