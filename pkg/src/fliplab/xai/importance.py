"""Permutation feature importance.

Importance of a column is the mean accuracy drop when that column is shuffled,
over n_repeats seeded shuffles. A model that never reads a column gives an
importance of exactly zero on every repeat; negative importances are legal and
reported as-is. Shuffle seeds are pre-split per (feature, repeat), so results
do not depend on evaluation order.
"""

from __future__ import annotations

import numpy as np

from .explanations import ImportanceReport

__all__ = ["permutation_importance"]


def permutation_importance(
    model,
    X: np.ndarray,
    y: np.ndarray,
    n_repeats: int = 10,
    seed: int = 0,
) -> ImportanceReport:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("permutation importance needs a non-empty 2-D feature matrix")
    if n_repeats < 1:
        raise ValueError(f"n_repeats must be >= 1, got {n_repeats}")
    n, d = X.shape

    baseline_pred = np.asarray(model.predict(X))
    baseline = float(np.mean(baseline_pred == y))

    if np.unique(baseline_pred).size == 1:
        zeros = np.zeros(d)
        return ImportanceReport(
            importances_mean=zeros,
            importances_std=zeros.copy(),
            baseline_score=baseline,
            metric="accuracy",
            n_repeats=n_repeats,
            feasible=False,
            note="baseline predictions are constant; shuffling cannot move the score",
        )

    seeds = np.random.SeedSequence(seed).spawn(d * n_repeats)
    drops = np.empty((d, n_repeats))
    for j in range(d):
        col = X[:, j].copy()
        Xp = X.copy()
        for r in range(n_repeats):
            rng = np.random.default_rng(seeds[j * n_repeats + r])
            Xp[:, j] = col[rng.permutation(n)]
            permuted = float(np.mean(np.asarray(model.predict(Xp)) == y))
            drops[j, r] = baseline - permuted
        Xp[:, j] = col

    return ImportanceReport(
        importances_mean=drops.mean(axis=1),
        importances_std=drops.std(axis=1),
        baseline_score=baseline,
        metric="accuracy",
        n_repeats=n_repeats,
        feasible=True,
    )
