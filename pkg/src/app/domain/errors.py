"""Error hierarchy (domain layer).

Every error carries the exit code the CLI maps it to:

- 2: I/O (missing or unreadable files, malformed containers)
- 3: validation (bad specs, bad configs, infeasible plans)
- 4: shape or configuration mismatch between artifacts
- 5: numeric failure (NaN in a forward pass, undefined metric)
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_MISMATCH = 4
EXIT_NUMERIC = 5


class TinyMyoError(Exception):
    """Base class for all engine errors."""

    exit_code: int = 1


class ContainerIOError(TinyMyoError, OSError):
    """A file could not be read, written, or parsed."""

    exit_code = EXIT_IO


class InvalidSpecError(TinyMyoError, ValueError):
    """An invalid filter, window or model description."""

    exit_code = EXIT_VALIDATION


class ConfigValidationError(InvalidSpecError):
    """A configuration file failed schema validation.

    Attributes:
        fields: Dotted names of the offending fields.
    """

    def __init__(self, message: str, fields: list[str] | None = None) -> None:
        super().__init__(message)
        self.fields = fields or []


class InvalidArgumentError(TinyMyoError, ValueError):
    """An operation received an argument outside its domain."""

    exit_code = EXIT_VALIDATION


class InfeasiblePlanError(InvalidSpecError):
    """No tiling satisfies the capacity constraints for a layer."""

    def __init__(self, message: str, layer: str) -> None:
        super().__init__(message)
        self.layer = layer


class GraphOrderError(InvalidSpecError):
    """A tensor is consumed before (or without) being defined."""


class ShapeMismatchError(TinyMyoError, ValueError):
    """Array shapes disagree with each other or with the model config."""

    exit_code = EXIT_MISMATCH


class CalibrationError(ShapeMismatchError):
    """Quantization was requested for a site that was never calibrated."""


class NumericFailureError(TinyMyoError, ArithmeticError):
    """A computation produced non-finite values."""

    exit_code = EXIT_NUMERIC


class UndefinedMetricError(NumericFailureError):
    """A metric is undefined for the given predictions."""


__all__ = [
    "EXIT_IO",
    "EXIT_MISMATCH",
    "EXIT_NUMERIC",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "CalibrationError",
    "ConfigValidationError",
    "ContainerIOError",
    "GraphOrderError",
    "InfeasiblePlanError",
    "InvalidArgumentError",
    "InvalidSpecError",
    "NumericFailureError",
    "ShapeMismatchError",
    "TinyMyoError",
    "UndefinedMetricError",
]
