"""Axis-aligned decision trees: the shared core under the forest, boosting,
and surrogate models.

Classification trees minimize weighted Gini with a vectorized sorted scan
over candidate features; gradient trees use the second-order gain
G^2/(H + lambda) and Newton leaf weights -G/(H + lambda). Candidate
thresholds sit halfway between consecutive distinct values, so split choice
does not depend on the order training rows are stored in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Tree", "grow_classification_tree", "grow_gradient_tree"]

# Minimum impurity / gain improvement to accept a split; filters float noise.
_MIN_GAIN = 1e-12


@dataclass
class Tree:
    """Flat-array binary tree. ``feature[i] < 0`` marks node i as a leaf.

    ``value`` rows hold the per-node payload: a class distribution for
    classification trees, a single Newton weight for gradient trees.
    """

    feature: np.ndarray
    threshold: np.ndarray
    children_left: np.ndarray
    children_right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def max_depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.children_left[i]] = depth[i] + 1
                depth[self.children_right[i]] = depth[i] + 1
        return int(depth.max()) if self.n_nodes else 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.children_left[nd], self.children_right[nd])
            active = active[self.feature[node[active]] >= 0]
        return node

    def leaf_values(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Argmax of the leaf distribution, ties to the lowest class index."""
        return np.argmax(self.leaf_values(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "children_left": self.children_left.tolist(),
            "children_right": self.children_right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            children_left=np.asarray(d["children_left"], dtype=np.int64),
            children_right=np.asarray(d["children_right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=np.float64),
            n_samples=np.asarray(d["n_samples"], dtype=np.float64),
        )


class _TreeBuilder:
    def __init__(self, value_width: int):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[np.ndarray] = []
        self.n_samples: list[float] = []
        self.value_width = value_width

    def add_node(self, value: np.ndarray, n: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(np.asarray(value, dtype=np.float64))
        self.n_samples.append(float(n))
        return len(self.feature) - 1

    def set_split(self, node: int, feature: int, threshold: float, left: int, right: int):
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = left
        self.right[node] = right

    def build(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            children_left=np.asarray(self.left, dtype=np.int64),
            children_right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
            n_samples=np.asarray(self.n_samples, dtype=np.float64),
        )


def _pick_features(n_features: int, max_features: int | None, rng) -> np.ndarray:
    if max_features is None or max_features >= n_features:
        return np.arange(n_features)
    return np.sort(rng.choice(n_features, size=max_features, replace=False))


def _best_sorted_split(Xn, ys, ws, n_classes, min_leaf):
    """Exhaustive threshold scan on pre-restricted columns.

    Returns (column, threshold, children_impurity) for the best weighted-Gini
    cut, or None. Ties break toward the lowest threshold within a column, then
    the lowest column.
    """
    m = Xn.shape[0]
    order = np.argsort(Xn, axis=0, kind="stable")
    Xs = np.take_along_axis(Xn, order, axis=0)
    ys_s = np.take_along_axis(ys[:, None].repeat(Xn.shape[1], 1), order, axis=0)
    ws_s = np.take_along_axis(ws[:, None].repeat(Xn.shape[1], 1), order, axis=0)

    onehot = (ys_s[:, :, None] == np.arange(n_classes)[None, None, :]) * ws_s[:, :, None]
    prefix = np.cumsum(onehot, axis=0)                      # (m, cols, K)
    total = prefix[-1]                                      # (cols, K)
    left = prefix[:-1]                                      # (m-1, cols, K)
    right = total[None, :, :] - left
    wl = left.sum(axis=2)
    wr = right.sum(axis=2)

    with np.errstate(divide="ignore", invalid="ignore"):
        imp = (wl - (left**2).sum(axis=2) / wl) + (wr - (right**2).sum(axis=2) / wr)
    boundary = Xs[1:] > Xs[:-1]
    if min_leaf > 1:
        pos = np.arange(1, m)[:, None]
        boundary = boundary & (pos >= min_leaf) & (m - pos >= min_leaf)
    imp = np.where(boundary & (wl > 0) & (wr > 0), imp, np.inf)

    col_best = np.argmin(imp, axis=0)                       # lowest threshold on ties
    col_scores = imp[col_best, np.arange(imp.shape[1])]
    col = int(np.argmin(col_scores))                        # lowest column on ties
    if not np.isfinite(col_scores[col]):
        return None
    cut = int(col_best[col])
    thr = 0.5 * (Xs[cut, col] + Xs[cut + 1, col])
    return col, float(thr), float(col_scores[col])


def _random_threshold_split(Xn, ys, ws, n_classes, rng):
    """Extra-trees style: one uniform threshold per candidate column, best Gini wins."""
    lo = Xn.min(axis=0)
    hi = Xn.max(axis=0)
    spread = hi > lo
    if not np.any(spread):
        return None
    thr = rng.uniform(lo, hi)
    left_mask = Xn <= thr[None, :]                          # (m, cols)
    onehot = (ys[:, None] == np.arange(n_classes)[None, :]) * ws[:, None]
    left = left_mask.T.astype(np.float64) @ onehot          # (cols, K)
    total = onehot.sum(axis=0)
    right = total[None, :] - left
    wl = left.sum(axis=1)
    wr = right.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        imp = (wl - (left**2).sum(axis=1) / wl) + (wr - (right**2).sum(axis=1) / wr)
    imp = np.where(spread & (wl > 0) & (wr > 0), imp, np.inf)
    col = int(np.argmin(imp))
    if not np.isfinite(imp[col]):
        return None
    return col, float(thr[col]), float(imp[col])


def grow_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    *,
    sample_weight: np.ndarray | None = None,
    max_depth: int | None = None,
    min_leaf: int = 1,
    max_features: int | None = None,
    splitter: str = "best",
    rng: np.random.Generator | None = None,
) -> Tree:
    """Weighted Gini CART. ``splitter='random'`` draws one threshold per
    candidate feature instead of scanning all cut points."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    if splitter not in ("best", "random"):
        raise ValueError(f"unknown splitter {splitter!r}")
    needs_rng = splitter == "random" or (max_features is not None and max_features < d)
    if needs_rng and rng is None:
        raise ValueError("rng is required for randomized splitting")

    builder = _TreeBuilder(n_classes)
    root = builder.add_node(np.zeros(n_classes), 0.0)
    stack = [(root, np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        wsub = w[idx]
        counts = np.bincount(y[idx], weights=wsub, minlength=n_classes)
        wtot = counts.sum()
        builder.value[node] = counts / wtot
        builder.n_samples[node] = wtot

        if (
            np.count_nonzero(counts) <= 1
            or (max_depth is not None and depth >= max_depth)
            or idx.size < 2 * min_leaf
        ):
            continue

        feats = _pick_features(d, max_features, rng)
        Xn = X[np.ix_(idx, feats)]
        if splitter == "best":
            found = _best_sorted_split(Xn, y[idx], wsub, n_classes, min_leaf)
        else:
            found = _random_threshold_split(Xn, y[idx], wsub, n_classes, rng)
        if found is None:
            continue
        col, thr, child_imp = found
        parent_imp = wtot - (counts**2).sum() / wtot
        if parent_imp - child_imp <= _MIN_GAIN:
            continue

        f = int(feats[col])
        mask = X[idx, f] <= thr
        left = builder.add_node(np.zeros(n_classes), 0.0)
        right = builder.add_node(np.zeros(n_classes), 0.0)
        builder.set_split(node, f, thr, left, right)
        stack.append((right, idx[~mask], depth + 1))
        stack.append((left, idx[mask], depth + 1))
    return builder.build()


def grow_gradient_tree(
    X: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    *,
    reg_lambda: float = 1.0,
    max_depth: int = 4,
    min_leaf: int = 1,
) -> Tree:
    """Second-order regression tree: leaf weight -G/(H+lambda), split gain
    (1/2)[GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)]. Deterministic; scans all
    features."""
    X = np.asarray(X, dtype=np.float64)
    g = np.asarray(grad, dtype=np.float64)
    h = np.asarray(hess, dtype=np.float64)
    n, d = X.shape
    lam = float(reg_lambda)

    builder = _TreeBuilder(1)
    root = builder.add_node(np.zeros(1), 0.0)
    stack = [(root, np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        G = g[idx].sum()
        H = h[idx].sum()
        builder.value[node] = np.array([-G / (H + lam)])
        builder.n_samples[node] = float(idx.size)

        if depth >= max_depth or idx.size < 2 * min_leaf:
            continue

        Xn = X[idx]
        order = np.argsort(Xn, axis=0, kind="stable")
        Xs = np.take_along_axis(Xn, order, axis=0)
        gs = np.take_along_axis(g[idx][:, None].repeat(d, 1), order, axis=0)
        hs = np.take_along_axis(h[idx][:, None].repeat(d, 1), order, axis=0)
        GL = np.cumsum(gs, axis=0)[:-1]
        HL = np.cumsum(hs, axis=0)[:-1]
        GR = G - GL
        HR = H - HL
        gain = 0.5 * (GL**2 / (HL + lam) + GR**2 / (HR + lam) - G**2 / (H + lam))
        boundary = Xs[1:] > Xs[:-1]
        if min_leaf > 1:
            pos = np.arange(1, idx.size)[:, None]
            boundary = boundary & (pos >= min_leaf) & (idx.size - pos >= min_leaf)
        gain = np.where(boundary, gain, -np.inf)

        col_best = np.argmax(gain, axis=0)
        col_gains = gain[col_best, np.arange(d)]
        col = int(np.argmax(col_gains))
        if not np.isfinite(col_gains[col]) or col_gains[col] <= _MIN_GAIN:
            continue
        cut = int(col_best[col])
        thr = 0.5 * (Xs[cut, col] + Xs[cut + 1, col])

        mask = X[idx, col] <= thr
        left = builder.add_node(np.zeros(1), 0.0)
        right = builder.add_node(np.zeros(1), 0.0)
        builder.set_split(node, col, float(thr), left, right)
        stack.append((right, idx[~mask], depth + 1))
        stack.append((left, idx[mask], depth + 1))
    return builder.build()
