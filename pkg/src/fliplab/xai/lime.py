"""Local linear surrogate of one prediction (LIME-style).

Perturbations are drawn around the instance with the training-set column
scales, the model's probability for the explained class is queried, and a
weighted least-squares line is fitted in standardized-offset coordinates.
Coefficients are the attributions (probability change per one training-sigma
move), the intercept is the surrogate's value at the instance, and the
weighted R-squared reports how locally faithful the line is.
"""

from __future__ import annotations

import math

import numpy as np

from ..data import ScalerParams
from .explanations import LocalExplanation

__all__ = ["lime_explain"]

_RIDGE_ALPHA = 1e-6


def lime_explain(
    model,
    instance: np.ndarray,
    train_stats: ScalerParams,
    n_samples: int = 1000,
    kernel_width: float | None = None,
    seed: int = 0,
    explained_class: int | None = None,
) -> LocalExplanation:
    instance = np.asarray(instance, dtype=np.float64).ravel()
    d = instance.shape[0]
    if n_samples < 50:
        raise ValueError(f"n_samples must be >= 50, got {n_samples}")
    if train_stats.std.shape[0] != d:
        raise ValueError("train_stats dimension does not match the instance")
    if kernel_width is None:
        kernel_width = 0.75 * math.sqrt(d)

    rng = np.random.default_rng(seed)
    sigma = train_stats.std
    offsets = rng.standard_normal((n_samples, d))          # standardized coords
    perturbed = instance + offsets * sigma

    proba = np.asarray(model.predict_proba(perturbed), dtype=np.float64)
    if explained_class is None:
        at_instance = np.asarray(model.predict_proba(instance[None, :]))[0]
        explained_class = int(np.argmax(at_instance))
    target = proba[:, explained_class]

    dist2 = (offsets**2).sum(axis=1)
    weights = np.exp(-dist2 / kernel_width**2)

    design = np.concatenate([np.ones((n_samples, 1)), offsets], axis=1)
    sw = np.sqrt(weights)
    A = design * sw[:, None]
    b = target * sw

    coef, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    ridge_fallback = rank < d + 1
    if ridge_fallback:
        gram = A.T @ A + _RIDGE_ALPHA * np.eye(d + 1)
        coef = np.linalg.solve(gram, A.T @ b)

    fitted = design @ coef
    resid = target - fitted
    wmean = np.average(target, weights=weights)
    ss_tot = float(np.sum(weights * (target - wmean) ** 2))
    ss_res = float(np.sum(weights * resid**2))
    r2 = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot

    return LocalExplanation(
        method="lime",
        instance=instance,
        explained_class=explained_class,
        attributions=coef[1:],
        base_value=float(coef[0]),
        diagnostics={
            "r2": r2,
            "ridge_fallback": ridge_fallback,
            "kernel_width": kernel_width,
            "n_samples": n_samples,
        },
    )
