"""Dataset container shared by the generator, extractor and learners."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError


@dataclass
class Dataset:
    """Feature matrix plus labels and provenance.

    ``features`` may be None for a freshly generated corpus whose
    signals have not been run through the extractor yet; ``signals``
    holds the raw waveforms when they are retained.
    """

    labels: np.ndarray
    features: np.ndarray | None = None
    signals: list | None = None
    seeds: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)
    registry_version: str | None = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.ndim != 1:
            raise ParameterError("labels must be a 1-D integer sequence")
        if self.features is not None:
            self.features = np.asarray(self.features, dtype=float)
            if self.features.shape[0] != len(self.labels):
                raise ParameterError("feature rows must match label count")
        if self.signals is not None and len(self.signals) != len(self.labels):
            raise ParameterError("signal count must match label count")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices)
        if indices.dtype == bool:
            indices = np.where(indices)[0]
        return Dataset(
            labels=self.labels[indices],
            features=None if self.features is None else self.features[indices],
            signals=None if self.signals is None else [self.signals[i] for i in indices],
            seeds=None if self.seeds is None else np.asarray(self.seeds)[indices],
            provenance=dict(self.provenance),
            registry_version=self.registry_version,
        )

    def with_features(self, features, registry_version=None) -> "Dataset":
        return replace(
            self,
            features=np.asarray(features, dtype=float),
            registry_version=registry_version or self.registry_version,
        )


@dataclass(frozen=True)
class Scaler:
    """Per-feature centering and scaling fitted on a training split."""

    mean: np.ndarray
    scale: np.ndarray

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (np.asarray(features, dtype=float) - self.mean) / self.scale


def fit_scaler(features: np.ndarray) -> Scaler:
    features = np.asarray(features, dtype=float)
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std = np.where(std == 0, 1.0, std)  # constant columns pass through as zeros
    return Scaler(mean=mean, scale=std)
