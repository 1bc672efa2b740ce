"""
Custom exception hierarchy for clean error handling.
"""


class CapacityError(Exception):
    """Base exception for every error raised by the toolkit."""

    pass


class DistributionError(CapacityError, ValueError):
    """Raised when a probability vector or stochastic matrix is malformed."""

    pass


class AlphabetMismatchError(CapacityError, ValueError):
    """Raised when symbols or matrices do not fit the alphabet they are used with."""

    pass


class InfeasibleSpecError(CapacityError, ValueError):
    """Raised when a network or adversary specification violates a feasibility constraint."""

    pass


class SpecMismatchError(CapacityError, ValueError):
    """Raised when a rate formula is asked to evaluate a network it does not cover."""

    def __init__(self, message: str, applicable: list[str] | None = None):
        self.applicable = applicable or []
        if self.applicable:
            message = f"{message} Applicable evaluators: {', '.join(self.applicable)}."
        super().__init__(message)


class SolverError(CapacityError):
    """Raised when the numerical minimax solver cannot produce a result."""

    pass


class BudgetViolationError(CapacityError):
    """Raised when an adversary emits a block outside its distortion budget."""

    pass


class DistortionAuditError(CapacityError):
    """Raised when a simulation run recorded a block above its route budget."""

    pass


class CodeConstructionError(CapacityError):
    """Raised when a code with the requested parameters cannot be built."""

    pass


class SearchSpaceError(CapacityError, ValueError):
    """Raised when an exhaustive search or enumeration would be too large."""

    pass


class ConfigurationError(CapacityError):
    """Raised for invalid configuration."""

    pass
