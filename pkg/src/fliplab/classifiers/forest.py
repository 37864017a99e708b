"""Bagged tree ensembles: random forest and extremely randomized trees.

Both average per-tree leaf class distributions. Randomness is drawn from
per-tree seed streams spawned off the model seed, so fits are reproducible
and independent of tree build order. Bootstrap resampling is folded into
integer sample weights, which grows the same tree as duplicating rows would.
"""

from __future__ import annotations

import numpy as np

from .tree import Tree, grow_classification_tree

__all__ = ["RandomForest", "ExtraTrees"]


class _TreeEnsemble:
    bootstrap: bool
    splitter: str

    def __init__(self, n_trees=100, max_features=5, max_depth=None, min_leaf=1,
                 seed=0, n_classes=4):
        if n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {n_trees}")
        self.n_trees = int(n_trees)
        self.max_features = max_features
        self.max_depth = max_depth
        self.min_leaf = int(min_leaf)
        self.seed = int(seed)
        self.n_classes = int(n_classes)
        self.trees_: list[Tree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "_TreeEnsemble":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n = X.shape[0]
        if n == 0:
            raise ValueError("cannot fit on an empty training set")
        self.trees_ = []
        for child in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(child)
            if self.bootstrap:
                counts = np.bincount(rng.integers(0, n, size=n), minlength=n)
                rows = np.flatnonzero(counts)
                weight = counts[rows].astype(np.float64)
                Xt, yt = X[rows], y[rows]
            else:
                Xt, yt, weight = X, y, None
            self.trees_.append(
                grow_classification_tree(
                    Xt, yt, self.n_classes,
                    sample_weight=weight,
                    max_depth=self.max_depth,
                    min_leaf=self.min_leaf,
                    max_features=self.max_features,
                    splitter=self.splitter,
                    rng=rng,
                )
            )
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees_:
            acc += tree.leaf_values(X)
        return acc / len(self.trees_)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_features": self.max_features,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "trees": [t.to_dict() for t in self.trees_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "_TreeEnsemble":
        model = cls(
            n_trees=d["n_trees"],
            max_features=d["max_features"],
            max_depth=d["max_depth"],
            min_leaf=d["min_leaf"],
            seed=d["seed"],
            n_classes=d["n_classes"],
        )
        model.trees_ = [Tree.from_dict(t) for t in d["trees"]]
        return model


class RandomForest(_TreeEnsemble):
    """Bootstrap rows, Gini splits over a random feature subset per node."""

    bootstrap = True
    splitter = "best"


class ExtraTrees(_TreeEnsemble):
    """No bootstrap; one uniform-random threshold per candidate feature."""

    bootstrap = False
    splitter = "random"
