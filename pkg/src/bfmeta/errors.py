"""Exception types shared across the package."""


class BfMetaError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BfMetaError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class RangeError(BfMetaError, ValueError):
    """A requested inversion target is outside the attainable range."""


class QuadratureError(BfMetaError, RuntimeError):
    """Adaptive quadrature failed to converge within its budget."""


class SingularMatrixError(BfMetaError, ValueError):
    """A design or prior matrix is numerically singular."""


class InsufficientDataError(BfMetaError, ValueError):
    """Studies lack the fields required by the selected method.

    Carries the offending study ids so callers can report them.
    """

    def __init__(self, message, study_ids=()):
        super().__init__(message)
        self.study_ids = list(study_ids)


class ValidationError(BfMetaError, ValueError):
    """Input file failed validation; `issues` lists row-level problems."""

    def __init__(self, message, issues=()):
        super().__init__(message)
        self.issues = list(issues)


class ConfigError(BfMetaError, ValueError):
    """A scenario or analysis configuration is invalid."""


class UndefinedAgreementError(BfMetaError, ZeroDivisionError):
    """Weighted kappa is undefined (expected disagreement is zero)."""
