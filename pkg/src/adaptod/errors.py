"""Exception hierarchy shared across the toolkit."""


class AdaptOdError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(AdaptOdError):
    """An argument violates a documented precondition (non-finite values, bad range, ...)."""


class ShapeError(AdaptOdError):
    """Dimension mismatch between related inputs."""


class InsufficientDataError(AdaptOdError):
    """Too few samples to compute the requested quantity."""


class EnergyOverflowError(AdaptOdError):
    """A linear-scale energy value is not representable in float64."""


class UndefinedMetricError(AdaptOdError):
    """A metric is undefined for the given inputs (e.g. no positives)."""


class TrainingDivergedError(AdaptOdError):
    """Training produced a non-finite loss or parameter."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class LogitFileError(AdaptOdError):
    """Malformed logit/dataset file; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigError(AdaptOdError):
    """Invalid run configuration."""
