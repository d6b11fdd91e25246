"""Soft-voting ensemble over fitted probability classifiers."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from .base import Classifier


def ensemble_predict_proba(members, weights, X) -> np.ndarray:
    """Weighted sum of member probability vectors, renormalized to sum 1."""
    if not members:
        raise ParameterError("ensemble needs at least one member")
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(members):
        raise ParameterError("one weight per member is required")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise ParameterError("weights must be >= 0 and not all zero")
    class_counts = {m.class_count for m in members}
    if len(class_counts) != 1:
        raise ParameterError(f"members disagree on class count: {sorted(class_counts)}")
    combined = None
    for weight, member in zip(weights, members):
        contribution = weight * member.predict_proba(X)
        combined = contribution if combined is None else combined + contribution
    return combined / combined.sum(axis=1, keepdims=True)


class SoftVotingEnsemble(Classifier):
    """Owns its member models and fits them on the same training data.

    The default roster pairs the forest's noise resistance with the
    boosted trees' non-linear fit and the SVM's handling of
    high-dimensional features.
    """

    kind = "ensemble"

    def __init__(self, member_specs=None, weights=None, seed: int = 0):
        super().__init__(seed=seed)
        from .base import ModelSpec

        if member_specs is None:
            member_specs = [
                ModelSpec(kind="svm", seed=seed),
                ModelSpec(kind="rf", seed=seed + 1),
                ModelSpec(kind="gbt", seed=seed + 2),
            ]
        self.member_specs = list(member_specs)
        if weights is None:
            weights = np.ones(len(self.member_specs))
        self.weights = np.asarray(weights, dtype=float)
        if self.member_specs:  # deserialization starts from an empty roster
            if len(self.weights) != len(self.member_specs):
                raise ParameterError("one weight per member is required")
            if np.any(self.weights < 0) or not np.any(self.weights > 0):
                raise ParameterError("weights must be >= 0 and not all zero")

    def _fit(self, X, y):
        self.members_ = [spec.build().fit(X, y) for spec in self.member_specs]

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        return ensemble_predict_proba(self.members_, self.weights, X)

    def to_dict(self) -> dict:
        from .io import model_to_dict

        return {
            "weights": self.weights.tolist(),
            "seed": self.seed,
            "class_count": self.class_count,
            "members": [model_to_dict(m) for m in self.members_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SoftVotingEnsemble":
        from .io import model_from_dict

        model = cls(member_specs=[], weights=None, seed=d["seed"])
        model.weights = np.array(d["weights"], dtype=float)
        model.class_count = d["class_count"]
        model.members_ = [model_from_dict(md) for md in d["members"]]
        return model
