"""Uniform train / predict / predict-proba contract for all learners."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError
from ..registry import REGISTRY_VERSION

MODEL_KINDS = ("knn", "svm", "rf", "gbt", "mlp", "ensemble")


class Classifier:
    """Base class: subclasses implement ``_fit`` and ``predict_proba``.

    A fitted model is immutable in use; ``class_count`` and
    ``training_seconds`` are set by ``fit``. ``predict`` breaks
    probability ties toward the lowest class index.
    """

    kind = "base"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.class_count: int | None = None
        self.training_seconds: float | None = None
        self.registry_version = REGISTRY_VERSION

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y) or len(y) == 0:
            raise ParameterError("X must be [n, d] with one label per row")
        if y.min() < 0:
            raise ParameterError("labels must be non-negative integers 0..C-1")
        self.class_count = int(y.max()) + 1
        start = time.perf_counter()
        self._fit(X, y)
        self.training_seconds = time.perf_counter() - start
        return self

    def _fit(self, X, y):
        raise NotImplementedError

    def predict_proba(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def _check_fitted(self):
        if self.class_count is None:
            raise ParameterError(f"{self.kind} model is not fitted")


@dataclass(frozen=True)
class ModelSpec:
    """Declarative model description: kind, hyperparameters and seed."""

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ParameterError(f"unknown model kind {self.kind!r}; known: {MODEL_KINDS}")
        _validate_params(self.kind, self.params)

    def build(self) -> Classifier:
        from . import make_model

        return make_model(self)


def _validate_params(kind: str, params: dict) -> None:
    p = dict(params)
    if kind == "knn":
        if p.get("k", 1) < 1:
            raise ParameterError("knn needs k >= 1")
        metric = p.get("metric", "euclidean")
        if metric not in ("euclidean", "manhattan", "cosine"):
            raise ParameterError(f"unknown knn metric {metric!r}")
    elif kind == "svm":
        if p.get("C", 1.0) <= 0:
            raise ParameterError("svm needs C > 0")
        if p.get("kernel", "rbf") not in ("linear", "rbf", "poly"):
            raise ParameterError("svm kernel must be linear, rbf or poly")
    elif kind == "rf":
        if p.get("n_trees", 1) < 1:
            raise ParameterError("rf needs n_trees >= 1")
    elif kind == "gbt":
        if p.get("n_rounds", 1) < 1:
            raise ParameterError("gbt needs n_rounds >= 1")
        lr = p.get("learning_rate", 0.3)
        if not 0 < lr <= 1:
            raise ParameterError("gbt learning_rate must be in (0, 1]")
    elif kind == "mlp":
        hidden = p.get("hidden", (64, 32))
        if len(hidden) != 2 or any(h < 1 for h in hidden):
            raise ParameterError("mlp needs two hidden layer sizes >= 1")
        lr = p.get("learning_rate", 0.05)
        if not 0 < lr <= 1:
            raise ParameterError("mlp learning_rate must be in (0, 1]")
    elif kind == "ensemble":
        weights = p.get("weights")
        if weights is not None:
            w = np.asarray(weights, dtype=float)
            if np.any(w < 0) or not np.any(w > 0):
                raise ParameterError("ensemble weights must be >= 0 and not all zero")


def validate_probabilities(probs: np.ndarray, class_count: int, atol: float = 1e-9) -> None:
    """Assert the ProbabilityVector contract: bounds and unit sums."""
    probs = np.asarray(probs)
    if probs.shape[-1] != class_count:
        raise ParameterError("probability vector length must equal class_count")
    if np.any(probs < -atol) or np.any(probs > 1 + atol):
        raise ParameterError("probabilities out of [0, 1]")
    sums = probs.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > atol):
        raise ParameterError("probabilities must sum to 1")
