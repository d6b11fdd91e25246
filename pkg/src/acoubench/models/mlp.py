"""Two-hidden-layer perceptron with a softmax head and cross-entropy loss."""

from __future__ import annotations

import numpy as np

from ..errors import DivergenceError, ParameterError
from .base import Classifier

_ACTIVATIONS = {
    "relu": (lambda z: np.maximum(z, 0.0), lambda z: (z > 0).astype(float)),
    "tanh": (np.tanh, lambda z: 1.0 - np.tanh(z) ** 2),
}


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class MLPClassifier(Classifier):
    """Mini-batch gradient descent on x -> act(W1x+b1) -> act(W2.+b2) -> softmax."""

    kind = "mlp"

    def __init__(
        self,
        hidden: tuple = (64, 32),
        activation: str = "relu",
        epochs: int = 80,
        learning_rate: float = 0.05,
        batch_size: int = 32,
        seed: int = 0,
    ):
        super().__init__(seed=seed)
        if len(hidden) != 2 or any(h < 1 for h in hidden):
            raise ParameterError("hidden must be two layer sizes >= 1")
        if activation not in _ACTIVATIONS:
            raise ParameterError(f"unknown activation {activation!r}")
        if not 0 < learning_rate <= 1:
            raise ParameterError("learning_rate must be in (0, 1]")
        self.hidden = (int(hidden[0]), int(hidden[1]))
        self.activation = activation
        self.epochs = int(epochs)
        self.learning_rate = float(learning_rate)
        self.batch_size = int(batch_size)

    def _init_weights(self, n_features: int, rng) -> list:
        sizes = [n_features, self.hidden[0], self.hidden[1], self.class_count]
        gain = 2.0 if self.activation == "relu" else 1.0
        weights = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            weights.append(rng.normal(0.0, np.sqrt(gain / fan_in), size=(fan_in, fan_out)))
            weights.append(np.zeros(fan_out))
        return weights

    def _forward(self, X, weights):
        act, _ = _ACTIVATIONS[self.activation]
        W1, b1, W2, b2, W3, b3 = weights
        z1 = X @ W1 + b1
        a1 = act(z1)
        z2 = a1 @ W2 + b2
        a2 = act(z2)
        z3 = a2 @ W3 + b3
        return z1, a1, z2, a2, _softmax(z3)

    def loss_and_gradients(self, X, y, weights=None):
        """Mean cross-entropy and its gradients w.r.t. every parameter."""
        weights = weights if weights is not None else self.weights_
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=int)
        _, dact = _ACTIVATIONS[self.activation]
        W1, b1, W2, b2, W3, b3 = weights
        z1, a1, z2, a2, probs = self._forward(X, weights)
        n = len(X)
        onehot = np.eye(self.class_count)[y]
        loss = -float(np.mean(np.sum(onehot * np.log(np.maximum(probs, 1e-15)), axis=1)))

        d3 = (probs - onehot) / n
        gW3 = a2.T @ d3
        gb3 = d3.sum(axis=0)
        d2 = (d3 @ W3.T) * dact(z2)
        gW2 = a1.T @ d2
        gb2 = d2.sum(axis=0)
        d1 = (d2 @ W2.T) * dact(z1)
        gW1 = X.T @ d1
        gb1 = d1.sum(axis=0)
        return loss, [gW1, gb1, gW2, gb2, gW3, gb3]

    def _fit(self, X, y):
        rng = np.random.default_rng(self.seed)
        self.weights_ = self._init_weights(X.shape[1], rng)
        n = len(X)
        self.loss_history_ = []
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                loss, grads = self.loss_and_gradients(X[batch], y[batch])
                if not np.isfinite(loss):
                    raise DivergenceError(
                        f"training loss became non-finite at epoch {epoch}; "
                        f"lower the learning rate (currently {self.learning_rate})"
                    )
                for w, g in zip(self.weights_, grads):
                    w -= self.learning_rate * g
            epoch_loss, _ = self.loss_and_gradients(X, y)
            self.loss_history_.append(epoch_loss)

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self._forward(X, self.weights_)[-1]

    def to_dict(self) -> dict:
        return {
            "hidden": list(self.hidden),
            "activation": self.activation,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "class_count": self.class_count,
            "weights": [w.tolist() for w in self.weights_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MLPClassifier":
        model = cls(
            hidden=tuple(d["hidden"]),
            activation=d["activation"],
            epochs=d["epochs"],
            learning_rate=d["learning_rate"],
            batch_size=d["batch_size"],
            seed=d["seed"],
        )
        model.class_count = d["class_count"]
        model.weights_ = [np.array(w, dtype=float) for w in d["weights"]]
        return model
