"""Benchmarking toolkit for audio-based equipment condition monitoring."""

__version__ = "0.1.0"

from .audio import (  # noqa: F401
    AudioSignal,
    NoiseProfile,
    normalize_amplitude,
    normalize_rms,
    spectral_subtract,
)
from .dataset import Dataset  # noqa: F401
from .features import FeatureVector, extract_all  # noqa: F401
from .registry import REGISTRY, REGISTRY_VERSION  # noqa: F401
from .synth import FaultClass, GeneratorConfig, generate_dataset  # noqa: F401
