"""Confusion matrices and the five evaluation metrics.

All averaged scores are macro (unweighted over the four classes) and
zero-denominator cases score 0; a constant predictor on a class with
prevalence p then collapses to the closed forms accuracy=p, recall=1/4,
precision=p/4, F1=p/(2(1+p)). Log loss clips probabilities into
[eps, 1-eps] so hard 0/1 outputs stay finite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import N_CLASSES

__all__ = [
    "MetricsError",
    "LengthMismatch",
    "EmptyMatrix",
    "NonStochasticRow",
    "confusion_matrix",
    "MetricsReport",
    "classification_metrics",
    "log_loss",
    "log_loss_per_label",
    "LOG_LOSS_EPS",
]

LOG_LOSS_EPS = 1e-15


class MetricsError(ValueError):
    pass


class LengthMismatch(MetricsError):
    pass


class EmptyMatrix(MetricsError):
    pass


class NonStochasticRow(MetricsError):
    pass


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray) -> np.ndarray:
    """Count matrix with rows = true class, columns = predicted class."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(
            f"y_true has {y_true.shape[0]} entries, y_pred has {y_pred.shape[0]}"
        )
    if y_true.size == 0:
        raise EmptyMatrix("cannot build a confusion matrix from zero samples")
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


@dataclass(frozen=True)
class MetricsReport:
    """Scores for one evaluation: overall, macro, and per-class."""

    accuracy: float
    macro_recall: float
    macro_precision: float
    macro_f1: float
    per_class_recall: tuple[float, ...]
    per_class_precision: tuple[float, ...]
    per_class_f1: tuple[float, ...]
    confusion: np.ndarray
    degenerate_constant_prediction: bool
    log_loss: float | None = None

    def with_log_loss(self, value: float) -> "MetricsReport":
        return MetricsReport(
            accuracy=self.accuracy,
            macro_recall=self.macro_recall,
            macro_precision=self.macro_precision,
            macro_f1=self.macro_f1,
            per_class_recall=self.per_class_recall,
            per_class_precision=self.per_class_precision,
            per_class_f1=self.per_class_f1,
            confusion=self.confusion,
            degenerate_constant_prediction=self.degenerate_constant_prediction,
            log_loss=value,
        )

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_recall": self.macro_recall,
            "macro_precision": self.macro_precision,
            "macro_f1": self.macro_f1,
            "per_class_recall": list(self.per_class_recall),
            "per_class_precision": list(self.per_class_precision),
            "per_class_f1": list(self.per_class_f1),
            "confusion": np.asarray(self.confusion).tolist(),
            "degenerate_constant_prediction": self.degenerate_constant_prediction,
            "log_loss": self.log_loss,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            accuracy=d["accuracy"],
            macro_recall=d["macro_recall"],
            macro_precision=d["macro_precision"],
            macro_f1=d["macro_f1"],
            per_class_recall=tuple(d["per_class_recall"]),
            per_class_precision=tuple(d["per_class_precision"]),
            per_class_f1=tuple(d["per_class_f1"]),
            confusion=np.asarray(d["confusion"], dtype=np.int64),
            degenerate_constant_prediction=d["degenerate_constant_prediction"],
            log_loss=d["log_loss"],
        )

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path


def classification_metrics(cm: np.ndarray) -> MetricsReport:
    """Accuracy and per-class / macro precision, recall, F1 from a confusion matrix.

    Per class, one-vs-rest: recall = TP/(TP+FN), precision = TP/(TP+FP),
    F1 = 2PR/(P+R), each 0 whenever its denominator is 0. Log loss is left
    unset; it needs probabilities, not counts.
    """
    cm = np.asarray(cm, dtype=np.int64)
    if cm.shape != (N_CLASSES, N_CLASSES):
        raise MetricsError(f"expected a {N_CLASSES}x{N_CLASSES} matrix, got {cm.shape}")
    total = int(cm.sum())
    if total == 0:
        raise EmptyMatrix("confusion matrix has zero total count")

    tp = np.diag(cm).astype(np.float64)
    true_counts = cm.sum(axis=1).astype(np.float64)  # TP + FN per class
    pred_counts = cm.sum(axis=0).astype(np.float64)  # TP + FP per class

    with np.errstate(divide="ignore", invalid="ignore"):
        recall = np.where(true_counts > 0, tp / true_counts, 0.0)
        precision = np.where(pred_counts > 0, tp / pred_counts, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / pr, 0.0)

    degenerate = int(np.count_nonzero(pred_counts)) == 1
    return MetricsReport(
        accuracy=float(tp.sum() / total),
        macro_recall=float(recall.mean()),
        macro_precision=float(precision.mean()),
        macro_f1=float(f1.mean()),
        per_class_recall=tuple(recall.tolist()),
        per_class_precision=tuple(precision.tolist()),
        per_class_f1=tuple(f1.tolist()),
        confusion=cm,
        degenerate_constant_prediction=degenerate,
    )


def _check_proba(y_true: np.ndarray, proba: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(y_true, dtype=np.int64)
    proba = np.asarray(proba, dtype=np.float64)
    if proba.ndim != 2 or proba.shape[1] != N_CLASSES:
        raise MetricsError(f"probability matrix must be n x {N_CLASSES}, got {proba.shape}")
    if y_true.shape[0] != proba.shape[0]:
        raise LengthMismatch(
            f"{y_true.shape[0]} labels vs {proba.shape[0]} probability rows"
        )
    if y_true.size == 0:
        raise EmptyMatrix("cannot score zero samples")
    sums = proba.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-6)
    if bad.size:
        raise NonStochasticRow(
            f"probability row {bad[0]} sums to {sums[bad[0]]!r}, expected 1"
        )
    return y_true, proba


def log_loss(y_true: np.ndarray, proba: np.ndarray, epsilon: float = LOG_LOSS_EPS) -> float:
    """Mean negative log probability of the true label, clipped to stay finite."""
    y_true, proba = _check_proba(y_true, proba)
    clipped = np.clip(proba, epsilon, 1.0 - epsilon)
    picked = clipped[np.arange(y_true.shape[0]), y_true]
    return float(-np.mean(np.log(picked)))


def log_loss_per_label(
    y_true: np.ndarray, proba: np.ndarray, epsilon: float = LOG_LOSS_EPS
) -> np.ndarray:
    """Per-label loss terms; their sum equals log_loss on the same inputs."""
    y_true, proba = _check_proba(y_true, proba)
    n = y_true.shape[0]
    clipped = np.clip(proba, epsilon, 1.0 - epsilon)
    onehot = np.zeros_like(clipped)
    onehot[np.arange(n), y_true] = 1.0
    return -(onehot * np.log(clipped)).sum(axis=0) / n
