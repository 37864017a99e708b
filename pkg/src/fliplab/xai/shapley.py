"""Sampled Shapley attributions by permutation walks.

Each iteration draws a feature ordering and a background row, then walks the
ordering, switching features from the background value to the instance value;
the change in the explained-class probability at each switch is credited to
the switched feature. Attributions are means over iterations, the base value
is the mean model output over the full background, and additivity
(base + sum = model output at the instance) holds within the reported
Monte-Carlo standard error. ``exhaustive=True`` enumerates every ordering and
background row, which makes the estimate exact for small feature counts.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .explanations import LocalExplanation

__all__ = ["shap_values"]

_EXHAUSTIVE_MAX_D = 9
_EVAL_CHUNK = 16384


def shap_values(
    model,
    instance: np.ndarray,
    background: np.ndarray,
    n_permutations: int = 50,
    seed: int = 0,
    explained_class: int | None = None,
    exhaustive: bool = False,
) -> LocalExplanation:
    instance = np.asarray(instance, dtype=np.float64).ravel()
    background = np.asarray(background, dtype=np.float64)
    if background.ndim != 2 or background.shape[0] == 0:
        raise ValueError("background must be a non-empty matrix")
    d = instance.shape[0]
    if background.shape[1] != d:
        raise ValueError("background width does not match the instance")
    if n_permutations < 1:
        raise ValueError(f"n_permutations must be >= 1, got {n_permutations}")
    if exhaustive and d > _EXHAUSTIVE_MAX_D:
        raise ValueError(f"exhaustive enumeration is limited to d <= {_EXHAUSTIVE_MAX_D}")

    if explained_class is None:
        at_instance = np.asarray(model.predict_proba(instance[None, :]))[0]
        explained_class = int(np.argmax(at_instance))

    def evaluate(X):
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], _EVAL_CHUNK):
            chunk = X[start : start + _EVAL_CHUNK]
            out[start : start + chunk.shape[0]] = np.asarray(
                model.predict_proba(chunk)
            )[:, explained_class]
        return out

    base_value = float(np.mean(evaluate(background)))

    if exhaustive:
        walks = [
            (np.asarray(perm, dtype=np.int64), b)
            for perm in itertools.permutations(range(d))
            for b in range(background.shape[0])
        ]
    else:
        rng = np.random.default_rng(seed)
        walks = [
            (rng.permutation(d), int(rng.integers(background.shape[0])))
            for _ in range(n_permutations)
        ]

    n_iter = len(walks)
    # build all walk states, evaluate in one batched pass
    states = np.empty((n_iter * (d + 1), d))
    for i, (perm, b) in enumerate(walks):
        block = states[i * (d + 1) : (i + 1) * (d + 1)]
        block[:] = background[b]
        for t in range(1, d + 1):
            block[t] = block[t - 1]
            block[t, perm[t - 1]] = instance[perm[t - 1]]
    values = evaluate(states).reshape(n_iter, d + 1)

    contribs = np.zeros((n_iter, d))
    for i, (perm, _) in enumerate(walks):
        contribs[i, perm] = np.diff(values[i])

    attributions = contribs.mean(axis=0)
    if n_iter > 1:
        per_feature_se = contribs.std(axis=0, ddof=1) / math.sqrt(n_iter)
        additivity_se = float(np.std(values[:, 0], ddof=1) / math.sqrt(n_iter))
    else:
        per_feature_se = np.zeros(d)
        additivity_se = 0.0

    return LocalExplanation(
        method="shap",
        instance=instance,
        explained_class=explained_class,
        attributions=attributions,
        base_value=base_value,
        diagnostics={
            "per_feature_se": per_feature_se.tolist(),
            "additivity_se": additivity_se,
            "n_iterations": n_iter,
            "exhaustive": exhaustive,
        },
    )
