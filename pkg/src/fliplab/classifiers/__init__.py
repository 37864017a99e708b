"""Six classifier families behind one train/predict/probability interface.

Families: random forest, extra trees, AdaBoost (SAMME), gradient boosted
trees (softmax objective, Newton leaves), a one-hidden-layer perceptron, and
k-nearest-neighbors. Every family is deterministic given its spec and
training data; predicted labels are always the argmax of predict_proba with
ties resolved toward the lowest class code.

Fitted models serialize to a versioned JSON document (KNN persists its
training matrix), optionally bundling the feature scaler they were trained
behind.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from ..data import Dataset, N_CLASSES, ScalerParams, SchemaMismatch
from .tree import Tree, grow_classification_tree, grow_gradient_tree
from .forest import RandomForest, ExtraTrees
from .boosting import AdaBoost, GradientBoostedTrees, softmax
from .mlp import MultilayerPerceptron
from .knn import KNearestNeighbors

__all__ = [
    "ModelFamily",
    "ModelSpec",
    "TrainedModel",
    "InvalidModelSpec",
    "FAMILY_DEFAULTS",
    "fit",
    "predict",
    "predict_proba",
    "save_model",
    "load_model",
    "Tree",
    "grow_classification_tree",
    "grow_gradient_tree",
    "RandomForest",
    "ExtraTrees",
    "AdaBoost",
    "GradientBoostedTrees",
    "MultilayerPerceptron",
    "KNearestNeighbors",
    "softmax",
]

MODEL_FORMAT = "fliplab-model"
MODEL_FORMAT_VERSION = 1


class InvalidModelSpec(ValueError):
    pass


class ModelFamily(enum.Enum):
    RANDOM_FOREST = "random_forest"
    EXTRA_TREES = "extra_trees"
    ADABOOST = "adaboost"
    GBT = "gbt"
    MLP = "mlp"
    KNN = "knn"

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @classmethod
    def parse(cls, text: str) -> "ModelFamily":
        key = text.strip().lower().replace("-", "_").replace(" ", "_")
        for fam in cls:
            if key in (fam.value, fam.name.lower()):
                return fam
        raise InvalidModelSpec(f"unknown model family {text!r}")


_DISPLAY_NAMES = {
    ModelFamily.RANDOM_FOREST: "Random Forest",
    ModelFamily.EXTRA_TREES: "Extra Trees",
    ModelFamily.ADABOOST: "AdaBoost",
    ModelFamily.GBT: "Gradient Boosted Trees",
    ModelFamily.MLP: "MLP",
    ModelFamily.KNN: "KNN",
}

_REGISTRY: dict[ModelFamily, tuple[type, dict]] = {
    ModelFamily.RANDOM_FOREST: (
        RandomForest,
        {"n_trees": 100, "max_features": 5, "max_depth": None, "min_leaf": 1},
    ),
    ModelFamily.EXTRA_TREES: (
        ExtraTrees,
        {"n_trees": 100, "max_features": 5, "max_depth": None, "min_leaf": 1},
    ),
    ModelFamily.ADABOOST: (
        AdaBoost,
        {"n_rounds": 50, "base_depth": 3, "base_min_leaf": 1},
    ),
    ModelFamily.GBT: (
        GradientBoostedTrees,
        {"n_rounds": 50, "max_depth": 4, "learning_rate": 0.3, "reg_lambda": 1.0,
         "min_leaf": 1},
    ),
    ModelFamily.MLP: (
        MultilayerPerceptron,
        {"hidden": 100, "learning_rate": 0.01, "epochs": 200, "batch_size": 32,
         "l2": 0.0},
    ),
    ModelFamily.KNN: (KNearestNeighbors, {"k": 5}),
}

#: Default hyperparameters per family; ModelSpec.params overrides by key.
FAMILY_DEFAULTS: dict[ModelFamily, dict] = {
    fam: dict(defaults) for fam, (_, defaults) in _REGISTRY.items()
}


@dataclass(frozen=True)
class ModelSpec:
    """A classifier family plus hyperparameter overrides and a seed."""

    family: ModelFamily
    seed: int = 0
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))
        cls, defaults = _REGISTRY[self.family]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise InvalidModelSpec(
                f"{self.family.value}: unknown hyperparameters {sorted(unknown)}"
            )
        try:
            cls(**{**defaults, **self.params}, seed=self.seed, n_classes=N_CLASSES)
        except ValueError as exc:
            raise InvalidModelSpec(f"{self.family.value}: {exc}") from exc

    def resolved_params(self) -> dict:
        return {**FAMILY_DEFAULTS[self.family], **self.params}

    def build(self):
        cls, defaults = _REGISTRY[self.family]
        return cls(**{**defaults, **self.params}, seed=self.seed, n_classes=N_CLASSES)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "seed": self.seed, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(
            family=ModelFamily.parse(d["family"]),
            seed=int(d.get("seed", 0)),
            params=d.get("params", {}),
        )


@dataclass
class TrainedModel:
    """A fitted estimator plus the spec and scaler it was trained behind.

    ``scaler`` is recorded when the training pipeline standardized features;
    prediction applies it automatically so callers always pass raw features.
    """

    spec: ModelSpec
    estimator: object
    n_features: int
    scaler: ScalerParams | None = None

    @property
    def family(self) -> ModelFamily:
        return self.spec.family

    def _prepare(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise SchemaMismatch(
                f"model expects {self.n_features} columns, got {X.shape}"
            )
        if self.scaler is not None:
            X = self.scaler.transform(X)
        return X

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.estimator.predict_proba(self._prepare(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "spec": self.spec.to_dict(),
            "n_features": self.n_features,
            "scaler": None if self.scaler is None else self.scaler.to_dict(),
            "estimator": self.estimator.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedModel":
        if d.get("format") != MODEL_FORMAT:
            raise InvalidModelSpec(f"not a {MODEL_FORMAT} document")
        if d.get("version") != MODEL_FORMAT_VERSION:
            raise InvalidModelSpec(f"unsupported model version {d.get('version')!r}")
        spec = ModelSpec.from_dict(d["spec"])
        est_cls, _ = _REGISTRY[spec.family]
        return cls(
            spec=spec,
            estimator=est_cls.from_dict(d["estimator"]),
            n_features=int(d["n_features"]),
            scaler=None if d["scaler"] is None else ScalerParams.from_dict(d["scaler"]),
        )


def fit(spec: ModelSpec, train: Dataset, scaler: ScalerParams | None = None) -> TrainedModel:
    """Train one classifier on a Dataset; deterministic given (spec, train).

    When ``scaler`` is given, training features are transformed through it and
    the scaler ships with the model, so later predictions take raw features.
    """
    X = train.features
    if scaler is not None:
        X = scaler.transform(X)
    estimator = spec.build().fit(X, train.labels)
    return TrainedModel(
        spec=spec, estimator=estimator, n_features=X.shape[1], scaler=scaler
    )


def predict(model: TrainedModel, features: np.ndarray) -> np.ndarray:
    return model.predict(features)


def predict_proba(model: TrainedModel, features: np.ndarray) -> np.ndarray:
    return model.predict_proba(features)


def save_model(model: TrainedModel, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(model.to_dict()) + "\n", encoding="utf-8")
    return path


def load_model(path: str | Path) -> TrainedModel:
    return TrainedModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
