"""Result types shared by the explainers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ImportanceReport", "LocalExplanation", "Rule", "SurrogateTree"]


@dataclass(frozen=True)
class ImportanceReport:
    """Permutation-importance summary over repeated column shuffles.

    ``feasible`` is False when the explained model predicts a single class on
    the evaluation set, in which case shuffling can never move the score and
    all importances are reported as zero.
    """

    importances_mean: np.ndarray
    importances_std: np.ndarray
    baseline_score: float
    metric: str
    n_repeats: int
    feasible: bool
    note: str = ""

    def to_dict(self, feature_names=None) -> dict:
        d = {
            "importances_mean": np.asarray(self.importances_mean).tolist(),
            "importances_std": np.asarray(self.importances_std).tolist(),
            "baseline_score": self.baseline_score,
            "metric": self.metric,
            "n_repeats": self.n_repeats,
            "feasible": self.feasible,
            "note": self.note,
        }
        if feature_names is not None:
            d["feature_names"] = list(feature_names)
        return d


@dataclass(frozen=True)
class LocalExplanation:
    """Per-feature attribution of one prediction.

    For the sampled-Shapley method the base value is the mean model output
    over the background and base + sum(attributions) tracks the model output
    at the instance within the reported Monte-Carlo error. For the local
    surrogate the base value is the weighted-least-squares intercept at the
    instance and diagnostics carry the local fit quality.
    """

    method: str
    instance: np.ndarray
    explained_class: int
    attributions: np.ndarray
    base_value: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def prediction_estimate(self) -> float:
        return float(self.base_value + np.sum(self.attributions))

    def to_dict(self, feature_names=None) -> dict:
        d = {
            "method": self.method,
            "instance": np.asarray(self.instance).tolist(),
            "explained_class": self.explained_class,
            "attributions": np.asarray(self.attributions).tolist(),
            "base_value": self.base_value,
            "diagnostics": dict(self.diagnostics),
        }
        if feature_names is not None:
            d["feature_names"] = list(feature_names)
        return d

    def force_plot_data(self, feature_names=None) -> dict:
        """Signed contribution list, largest magnitude first, for chart rendering."""
        attrs = np.asarray(self.attributions, dtype=float)
        names = (
            list(feature_names)
            if feature_names is not None
            else [f"f{i}" for i in range(attrs.size)]
        )
        order = np.argsort(-np.abs(attrs), kind="stable")
        return {
            "method": self.method,
            "explained_class": self.explained_class,
            "base_value": self.base_value,
            "prediction_estimate": self.prediction_estimate,
            "contributions": [
                {
                    "feature": names[i],
                    "value": float(self.instance[i]),
                    "attribution": float(attrs[i]),
                }
                for i in order
            ],
        }


@dataclass(frozen=True)
class Rule:
    """Root-to-leaf conjunction: every condition is (feature, '<=' or '>', threshold)."""

    conditions: tuple[tuple[int, str, float], ...]
    predicted_class: int
    support: float

    def text(self, feature_names=None, class_names=None) -> str:
        def fname(i):
            return feature_names[i] if feature_names is not None else f"f{i}"

        cname = (
            class_names[self.predicted_class]
            if class_names is not None
            else str(self.predicted_class)
        )
        if not self.conditions:
            body = "always"
        else:
            body = " and ".join(
                f"{fname(f)} {op} {thr:.6g}" for f, op, thr in self.conditions
            )
        return f"if {body} then {cname} (support={self.support:g})"


@dataclass(frozen=True)
class SurrogateTree:
    """A CART distilled from a black-box model's predictions.

    ``fidelity`` is the agreement rate with the explained model on the
    reference set the surrogate was fitted on.
    """

    tree: "object"
    max_depth: int
    fidelity: float
    n_classes: int
    feature_names: tuple[str, ...] | None = None

    @property
    def n_leaves(self) -> int:
        return self.tree.n_leaves

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.tree.predict(X)

    def to_dict(self) -> dict:
        return {
            "tree": self.tree.to_dict(),
            "max_depth": self.max_depth,
            "fidelity": self.fidelity,
            "n_classes": self.n_classes,
            "feature_names": None if self.feature_names is None else list(self.feature_names),
        }
