"""Exception types shared across the toolkit."""


class AcoubenchError(Exception):
    """Base class for all toolkit-specific errors."""


class DegenerateSignalError(AcoubenchError, ValueError):
    """Raised when an operation receives a signal it cannot meaningfully process
    (all-zero input to a normalizer, zero-power signal for SNR injection, ...)."""


class ParameterError(AcoubenchError, ValueError):
    """Raised when an argument violates a documented precondition."""


class UnsupportedWavError(AcoubenchError, ValueError):
    """Raised for WAV files outside the supported 16-bit PCM mono profile."""


class ConvergenceWarning(UserWarning):
    """Emitted when an iterative solver stops at its iteration cap."""


class DivergenceError(AcoubenchError, RuntimeError):
    """Raised when iterative training produces non-finite loss."""


class PipelineStageError(AcoubenchError, RuntimeError):
    """Wraps a failure inside the benchmark pipeline with the stage named."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
