"""Global surrogate decision trees and rule extraction.

The surrogate is a plain CART fitted to the black-box model's predicted
labels on a reference set; fidelity is the agreement rate with the model on
that same set, which is non-decreasing in the depth cap. Rules are the
root-to-leaf threshold conjunctions, one per leaf, and partition the feature
space.
"""

from __future__ import annotations

import numpy as np

from ..classifiers.tree import grow_classification_tree
from .explanations import Rule, SurrogateTree

__all__ = ["surrogate_tree", "extract_rules"]


def surrogate_tree(
    model,
    X: np.ndarray,
    max_depth: int,
    n_classes: int = 4,
    feature_names=None,
) -> SurrogateTree:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("surrogate fitting needs a non-empty 2-D feature matrix")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    teacher_pred = np.asarray(model.predict(X), dtype=np.int64)
    tree = grow_classification_tree(X, teacher_pred, n_classes, max_depth=max_depth)
    fidelity = float(np.mean(tree.predict(X) == teacher_pred))
    return SurrogateTree(
        tree=tree,
        max_depth=max_depth,
        fidelity=fidelity,
        n_classes=n_classes,
        feature_names=None if feature_names is None else tuple(feature_names),
    )


def extract_rules(surrogate: SurrogateTree) -> list[Rule]:
    """One rule per leaf, in left-to-right tree order."""
    tree = surrogate.tree
    rules: list[Rule] = []

    def walk(node: int, conditions: tuple):
        if tree.feature[node] < 0:
            rules.append(
                Rule(
                    conditions=conditions,
                    predicted_class=int(np.argmax(tree.value[node])),
                    support=float(tree.n_samples[node]),
                )
            )
            return
        f = int(tree.feature[node])
        thr = float(tree.threshold[node])
        walk(int(tree.children_left[node]), conditions + ((f, "<=", thr),))
        walk(int(tree.children_right[node]), conditions + ((f, ">", thr),))

    walk(0, ())
    return rules
