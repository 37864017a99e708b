"""K-nearest-neighbors with unsmoothed vote probabilities.

Distances are Euclidean; callers are expected to standardize features first.
Equal distances rank by stored row index (stable sort), and vote fractions
are emitted raw, so probabilities of exactly 0 are common at small k.
"""

from __future__ import annotations

import numpy as np

__all__ = ["KNearestNeighbors"]

# rows per distance-matrix chunk; bounds peak memory at ~25 MB for n=5000
_CHUNK = 256


class KNearestNeighbors:
    def __init__(self, k=5, seed=0, n_classes=4):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.k = int(k)
        self.seed = int(seed)
        self.n_classes = int(n_classes)
        self.train_X_: np.ndarray | None = None
        self.train_y_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KNearestNeighbors":
        X = np.array(X, dtype=np.float64)
        y = np.array(y, dtype=np.int64)
        if X.shape[0] == 0:
            raise ValueError("cannot fit on an empty training set")
        if self.k > X.shape[0]:
            raise ValueError(f"k={self.k} exceeds {X.shape[0]} training rows")
        self.train_X_ = X
        self.train_y_ = y
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], self.n_classes))
        for start in range(0, X.shape[0], _CHUNK):
            chunk = X[start : start + _CHUNK]
            diff = chunk[:, None, :] - self.train_X_[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            order = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            votes = self.train_y_[order]
            for c in range(self.n_classes):
                out[start : start + chunk.shape[0], c] = (votes == c).sum(axis=1)
        return out / self.k

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "train_X": None if self.train_X_ is None else self.train_X_.tolist(),
            "train_y": None if self.train_y_ is None else self.train_y_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KNearestNeighbors":
        model = cls(k=d["k"], seed=d["seed"], n_classes=d["n_classes"])
        if d["train_X"] is not None:
            model.train_X_ = np.asarray(d["train_X"], dtype=np.float64)
            model.train_y_ = np.asarray(d["train_y"], dtype=np.int64)
        return model
