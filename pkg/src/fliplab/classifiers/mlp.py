"""Single-hidden-layer perceptron trained with mini-batch SGD.

ReLU hidden layer, softmax output, cross-entropy loss, fixed learning rate,
hard epoch cap (hitting the cap is a normal exit, not an error). Weights are
float64 throughout and the loss/gradient pair is exposed for finite-difference
checking. A training set with a single distinct label short-circuits to a
constant predictor: softmax saturation cannot reach certainty by SGD alone.
"""

from __future__ import annotations

import numpy as np

from .boosting import softmax

__all__ = ["MultilayerPerceptron"]


def _relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


class MultilayerPerceptron:
    def __init__(self, hidden=100, learning_rate=0.01, epochs=200, batch_size=32,
                 l2=0.0, seed=0, n_classes=4):
        if hidden < 1 or epochs < 1 or batch_size < 1:
            raise ValueError("hidden, epochs and batch_size must all be >= 1")
        if learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {learning_rate}")
        if l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {l2}")
        self.hidden = int(hidden)
        self.learning_rate = float(learning_rate)
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.l2 = float(l2)
        self.seed = int(seed)
        self.n_classes = int(n_classes)
        self.w1: np.ndarray | None = None
        self.b1: np.ndarray | None = None
        self.w2: np.ndarray | None = None
        self.b2: np.ndarray | None = None
        self.constant_class_: int | None = None
        self.n_features_: int | None = None

    def init_parameters(self, n_features: int, rng: np.random.Generator) -> None:
        """Fan-in-scaled uniform weights, zero biases."""
        lim1 = np.sqrt(6.0 / n_features)
        lim2 = np.sqrt(6.0 / self.hidden)
        self.w1 = rng.uniform(-lim1, lim1, size=(n_features, self.hidden))
        self.b1 = np.zeros(self.hidden)
        self.w2 = rng.uniform(-lim2, lim2, size=(self.hidden, self.n_classes))
        self.b2 = np.zeros(self.n_classes)
        self.n_features_ = n_features

    def _onehot(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros((y.shape[0], self.n_classes))
        out[np.arange(y.shape[0]), y] = 1.0
        return out

    def loss_and_gradients(
        self, X: np.ndarray, y: np.ndarray
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean cross-entropy over the batch and its analytic gradients."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n = X.shape[0]
        onehot = self._onehot(y)

        pre = X @ self.w1 + self.b1
        hid = _relu(pre)
        logits = hid @ self.w2 + self.b2
        proba = softmax(logits)
        picked = np.clip(proba[np.arange(n), y], 1e-300, None)
        loss = float(-np.mean(np.log(picked)))

        delta_out = (proba - onehot) / n
        grad_w2 = hid.T @ delta_out
        grad_b2 = delta_out.sum(axis=0)
        delta_hid = (delta_out @ self.w2.T) * (pre > 0)
        grad_w1 = X.T @ delta_hid
        grad_b1 = delta_hid.sum(axis=0)
        if self.l2 > 0.0:
            # penalty applies to weights only, never biases
            loss += 0.5 * self.l2 * float((self.w1**2).sum() + (self.w2**2).sum())
            grad_w1 = grad_w1 + self.l2 * self.w1
            grad_w2 = grad_w2 + self.l2 * self.w2
        return loss, {"w1": grad_w1, "b1": grad_b1, "w2": grad_w2, "b2": grad_b2}

    def parameter_vector(self) -> np.ndarray:
        return np.concatenate(
            [self.w1.ravel(), self.b1, self.w2.ravel(), self.b2]
        )

    def set_parameter_vector(self, vec: np.ndarray) -> None:
        vec = np.asarray(vec, dtype=np.float64)
        sizes = [self.w1.size, self.b1.size, self.w2.size, self.b2.size]
        offsets = np.cumsum([0] + sizes)
        self.w1 = vec[offsets[0]:offsets[1]].reshape(self.w1.shape).copy()
        self.b1 = vec[offsets[1]:offsets[2]].copy()
        self.w2 = vec[offsets[2]:offsets[3]].reshape(self.w2.shape).copy()
        self.b2 = vec[offsets[3]:offsets[4]].copy()

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MultilayerPerceptron":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n, d = X.shape
        if n == 0:
            raise ValueError("cannot fit on an empty training set")
        self.n_features_ = d

        distinct = np.unique(y)
        if distinct.size == 1:
            self.constant_class_ = int(distinct[0])
            return self
        self.constant_class_ = None

        rng = np.random.default_rng(self.seed)
        self.init_parameters(d, rng)
        for _ in range(self.epochs):
            perm = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = perm[start : start + self.batch_size]
                _, grads = self.loss_and_gradients(X[batch], y[batch])
                self.w1 -= self.learning_rate * grads["w1"]
                self.b1 -= self.learning_rate * grads["b1"]
                self.w2 -= self.learning_rate * grads["w2"]
                self.b2 -= self.learning_rate * grads["b2"]
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.constant_class_ is not None:
            out = np.zeros((X.shape[0], self.n_classes))
            out[:, self.constant_class_] = 1.0
            return out
        hid = _relu(X @ self.w1 + self.b1)
        return softmax(hid @ self.w2 + self.b2)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "hidden": self.hidden,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "l2": self.l2,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "constant_class": self.constant_class_,
            "n_features": self.n_features_,
            "w1": None if self.w1 is None else self.w1.tolist(),
            "b1": None if self.b1 is None else self.b1.tolist(),
            "w2": None if self.w2 is None else self.w2.tolist(),
            "b2": None if self.b2 is None else self.b2.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MultilayerPerceptron":
        model = cls(
            hidden=d["hidden"],
            learning_rate=d["learning_rate"],
            epochs=d["epochs"],
            batch_size=d["batch_size"],
            l2=d.get("l2", 0.0),
            seed=d["seed"],
            n_classes=d["n_classes"],
        )
        model.constant_class_ = d["constant_class"]
        model.n_features_ = d["n_features"]
        for name in ("w1", "b1", "w2", "b2"):
            setattr(model, name, None if d[name] is None else np.asarray(d[name]))
        return model
