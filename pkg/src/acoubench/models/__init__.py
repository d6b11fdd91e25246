"""Six from-scratch classifiers plus a soft-voting ensemble."""

from __future__ import annotations

from ..errors import ParameterError
from .base import MODEL_KINDS, Classifier, ModelSpec, validate_probabilities
from .boosting import GradientBoostedTrees
from .ensemble import SoftVotingEnsemble, ensemble_predict_proba
from .forest import DecisionTree, RandomForestClassifier, default_max_features
from .io import load_model, model_from_dict, model_to_dict, save_model
from .knn import KNNClassifier, cosine_distance
from .mlp import MLPClassifier
from .svm import SVMClassifier
from .timing import TimingReport, measure_timing

__all__ = [
    "MODEL_KINDS",
    "Classifier",
    "ModelSpec",
    "validate_probabilities",
    "KNNClassifier",
    "SVMClassifier",
    "RandomForestClassifier",
    "DecisionTree",
    "default_max_features",
    "GradientBoostedTrees",
    "MLPClassifier",
    "SoftVotingEnsemble",
    "ensemble_predict_proba",
    "cosine_distance",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
    "measure_timing",
    "TimingReport",
    "make_model",
]

_CLASSES = {
    "knn": KNNClassifier,
    "svm": SVMClassifier,
    "rf": RandomForestClassifier,
    "gbt": GradientBoostedTrees,
    "mlp": MLPClassifier,
}


def make_model(spec: ModelSpec) -> Classifier:
    """Instantiate an unfitted model from its declarative spec."""
    if spec.kind == "ensemble":
        params = dict(spec.params)
        member_specs = params.pop("members", None)
        if member_specs is not None:
            member_specs = [
                m if isinstance(m, ModelSpec) else ModelSpec(**m) for m in member_specs
            ]
        weights = params.pop("weights", None)
        return SoftVotingEnsemble(
            member_specs=member_specs, weights=weights, seed=spec.seed, **params
        )
    if spec.kind not in _CLASSES:
        raise ParameterError(f"unknown model kind {spec.kind!r}")
    params = dict(spec.params)
    if "hidden" in params:
        params["hidden"] = tuple(params["hidden"])
    return _CLASSES[spec.kind](seed=spec.seed, **params)
