"""Exception types shared across the package."""


class YamabeFlowError(Exception):
    """Base class for all package errors."""


class DomainError(YamabeFlowError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidFieldError(YamabeFlowError, ValueError):
    """A radial field violates a positivity or shape requirement."""


class ConfigurationError(YamabeFlowError, ValueError):
    """Inconsistent run configuration (mesh/data/boundary mismatch)."""


class StepFailureError(YamabeFlowError, RuntimeError):
    """A time step produced a non-positive conformal factor.

    Carries the offending node radius and value so the caller can retry
    with a smaller step.
    """

    def __init__(self, radius: float, value: float, message: str | None = None):
        self.radius = radius
        self.value = value
        super().__init__(
            message or f"non-positive conformal factor {value:.3e} at r={radius:.6g}"
        )
