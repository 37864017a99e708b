"""Boosted ensembles: multiclass AdaBoost (SAMME) and second-order gradient
boosted trees with a softmax objective.

AdaBoost reweights misclassified rows by exp(alpha) per round and stops early
when the weak learner loses its edge (weighted error reaching 1 - 1/K) or
becomes perfect. The gradient booster fits one regression tree per class per
round on the softmax gradients/hessians, XGBoost style, with Newton leaf
weights and an L2 leaf penalty.
"""

from __future__ import annotations

import math

import numpy as np

from .tree import Tree, grow_classification_tree, grow_gradient_tree

__all__ = ["AdaBoost", "GradientBoostedTrees", "softmax"]

# Stand-in error for a perfect weak learner so its vote weight stays finite.
_PERFECT_ERR = 1e-12


def softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class AdaBoost:
    """SAMME with depth-limited CART base learners."""

    def __init__(self, n_rounds=50, base_depth=3, base_min_leaf=1, seed=0, n_classes=4):
        if n_rounds < 1:
            raise ValueError(f"n_rounds must be >= 1, got {n_rounds}")
        if base_depth < 1:
            raise ValueError(f"base_depth must be >= 1, got {base_depth}")
        if base_min_leaf < 1:
            raise ValueError(f"base_min_leaf must be >= 1, got {base_min_leaf}")
        self.n_rounds = int(n_rounds)
        self.base_depth = int(base_depth)
        self.base_min_leaf = int(base_min_leaf)
        self.seed = int(seed)
        self.n_classes = int(n_classes)
        self.trees_: list[Tree] = []
        self.alphas_: list[float] = []
        self.stage_errors_: list[float] = []
        self.prior_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "AdaBoost":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n = X.shape[0]
        if n == 0:
            raise ValueError("cannot fit on an empty training set")
        K = self.n_classes
        self.trees_, self.alphas_, self.stage_errors_ = [], [], []
        self.prior_ = np.bincount(y, minlength=K) / n

        w = np.full(n, 1.0 / n)
        for _ in range(self.n_rounds):
            tree = grow_classification_tree(
                X, y, K, sample_weight=w, max_depth=self.base_depth,
                min_leaf=self.base_min_leaf,
            )
            miss = tree.predict(X) != y
            err = float(w[miss].sum())
            if err >= 1.0 - 1.0 / K:
                break  # no edge left; drop the round and stop
            err = max(err, _PERFECT_ERR)
            alpha = math.log((1.0 - err) / err) + math.log(K - 1.0)
            self.trees_.append(tree)
            self.alphas_.append(alpha)
            self.stage_errors_.append(err)
            if err <= _PERFECT_ERR:
                break  # perfect learner dominates every further vote
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if not self.trees_:
            # boosting never got off the ground; fall back to the label prior
            return np.tile(self.prior_, (X.shape[0], 1))
        votes = np.zeros((X.shape[0], self.n_classes))
        for tree, alpha in zip(self.trees_, self.alphas_):
            votes[np.arange(X.shape[0]), tree.predict(X)] += alpha
        return votes / sum(self.alphas_)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "n_rounds": self.n_rounds,
            "base_depth": self.base_depth,
            "base_min_leaf": self.base_min_leaf,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "trees": [t.to_dict() for t in self.trees_],
            "alphas": self.alphas_,
            "stage_errors": self.stage_errors_,
            "prior": None if self.prior_ is None else self.prior_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AdaBoost":
        model = cls(
            n_rounds=d["n_rounds"],
            base_depth=d["base_depth"],
            base_min_leaf=d.get("base_min_leaf", 1),
            seed=d["seed"],
            n_classes=d["n_classes"],
        )
        model.trees_ = [Tree.from_dict(t) for t in d["trees"]]
        model.alphas_ = list(d["alphas"])
        model.stage_errors_ = list(d["stage_errors"])
        model.prior_ = None if d["prior"] is None else np.asarray(d["prior"])
        return model


class GradientBoostedTrees:
    """Softmax-objective boosting, one depth-capped tree per class per round.

    Gradients g = p - y and hessians h = p(1 - p) come from the current
    softmax probabilities; leaf weights are -G/(H + lambda). The learning
    rate is baked into stored leaf values, so prediction just sums trees.
    """

    def __init__(self, n_rounds=50, max_depth=4, learning_rate=0.3,
                 reg_lambda=1.0, min_leaf=1, seed=0, n_classes=4):
        if n_rounds < 1:
            raise ValueError(f"n_rounds must be >= 1, got {n_rounds}")
        if learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {learning_rate}")
        if reg_lambda < 0:
            raise ValueError(f"reg_lambda must be >= 0, got {reg_lambda}")
        if min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {min_leaf}")
        self.n_rounds = int(n_rounds)
        self.max_depth = int(max_depth)
        self.learning_rate = float(learning_rate)
        self.reg_lambda = float(reg_lambda)
        self.min_leaf = int(min_leaf)
        self.seed = int(seed)
        self.n_classes = int(n_classes)
        self.trees_: list[list[Tree]] = []  # [round][class]

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GradientBoostedTrees":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n = X.shape[0]
        if n == 0:
            raise ValueError("cannot fit on an empty training set")
        K = self.n_classes
        onehot = np.zeros((n, K))
        onehot[np.arange(n), y] = 1.0

        scores = np.zeros((n, K))
        self.trees_ = []
        for _ in range(self.n_rounds):
            proba = softmax(scores)
            grad = proba - onehot
            hess = proba * (1.0 - proba)
            round_trees = []
            for k in range(K):
                tree = grow_gradient_tree(
                    X, grad[:, k], hess[:, k],
                    reg_lambda=self.reg_lambda,
                    max_depth=self.max_depth,
                    min_leaf=self.min_leaf,
                )
                tree.value *= self.learning_rate
                scores[:, k] += tree.leaf_values(X)[:, 0]
                round_trees.append(tree)
            self.trees_.append(round_trees)
        return self

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        scores = np.zeros((X.shape[0], self.n_classes))
        for round_trees in self.trees_:
            for k, tree in enumerate(round_trees):
                scores[:, k] += tree.leaf_values(X)[:, 0]
        return scores

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.decision_scores(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "n_rounds": self.n_rounds,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "reg_lambda": self.reg_lambda,
            "min_leaf": self.min_leaf,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "trees": [[t.to_dict() for t in rnd] for rnd in self.trees_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GradientBoostedTrees":
        model = cls(
            n_rounds=d["n_rounds"],
            max_depth=d["max_depth"],
            learning_rate=d["learning_rate"],
            reg_lambda=d["reg_lambda"],
            min_leaf=d.get("min_leaf", 1),
            seed=d["seed"],
            n_classes=d["n_classes"],
        )
        model.trees_ = [[Tree.from_dict(t) for t in rnd] for rnd in d["trees"]]
        return model
