"""Wall-clock timing of training and per-sample prediction."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError


@dataclass(frozen=True)
class TimingReport:
    training_seconds: float  # median over repetitions
    training_cv: float  # coefficient of variation across repetitions
    prediction_ms_per_sample: float  # median over repetitions
    prediction_cv: float
    repetitions: int


def _cv(values: np.ndarray) -> float:
    mean = values.mean()
    return float(values.std() / mean) if mean > 0 else 0.0


def measure_timing(model_factory, X_train, y_train, X_query, repetitions: int = 3) -> TimingReport:
    """Median wall-clock cost of a fresh fit and of batch prediction.

    ``model_factory`` must return an unfitted model so every repetition
    trains from scratch.
    """
    if repetitions < 3:
        raise ParameterError("need at least 3 repetitions for a meaningful median")
    X_query = np.atleast_2d(np.asarray(X_query, dtype=float))
    train_times = np.empty(repetitions)
    predict_times = np.empty(repetitions)
    model = None
    for r in range(repetitions):
        model = model_factory()
        start = time.perf_counter()
        model.fit(X_train, y_train)
        train_times[r] = time.perf_counter() - start
        start = time.perf_counter()
        model.predict_proba(X_query)
        predict_times[r] = time.perf_counter() - start
    return TimingReport(
        training_seconds=float(np.median(train_times)),
        training_cv=_cv(train_times),
        prediction_ms_per_sample=float(np.median(predict_times)) * 1000.0 / len(X_query),
        prediction_cv=_cv(predict_times),
        repetitions=repetitions,
    )
