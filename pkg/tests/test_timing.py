import numpy as np
import pytest

from acoubench.errors import ParameterError
from acoubench.models import KNNClassifier, measure_timing


def test_timings_are_positive(rng):
    X = rng.normal(size=(100, 8))
    y = rng.integers(0, 2, size=100)
    report = measure_timing(lambda: KNNClassifier(k=3), X, y, X[:20], repetitions=3)
    assert report.training_seconds > 0
    assert report.prediction_ms_per_sample > 0
    assert report.repetitions == 3


def test_dispersion_reported(rng):
    X = rng.normal(size=(60, 4))
    y = rng.integers(0, 2, size=60)
    report = measure_timing(lambda: KNNClassifier(k=3), X, y, X[:10], repetitions=5)
    assert report.training_cv >= 0
    assert report.prediction_cv >= 0


def test_knn_prediction_grows_with_training_size(rng):
    # brute-force neighbour search: 4x the training set must take longer
    queries = rng.normal(size=(200, 16))
    y_small = rng.integers(0, 2, size=2000)
    X_small = rng.normal(size=(2000, 16))
    X_large = rng.normal(size=(8000, 16))
    y_large = rng.integers(0, 2, size=8000)
    small = measure_timing(lambda: KNNClassifier(k=5), X_small, y_small, queries, repetitions=5)
    large = measure_timing(lambda: KNNClassifier(k=5), X_large, y_large, queries, repetitions=5)
    assert large.prediction_ms_per_sample > small.prediction_ms_per_sample


def test_too_few_repetitions_rejected(rng):
    X = rng.normal(size=(10, 2))
    y = rng.integers(0, 2, size=10)
    with pytest.raises(ParameterError):
        measure_timing(lambda: KNNClassifier(k=1), X, y, X, repetitions=2)
