"""
Exception hierarchy with machine-readable error codes
"""

from typing import Any, Optional


class QptError(Exception):
    """Base error; `error_code` is what the CLI reports"""

    error_code = "QPT_ERROR"
    exit_code = 3

    def __init__(self, message: str, field: Optional[str] = None, details: Any = None):
        super().__init__(message)
        self.message = message
        self.field = field
        self.details = details


class ValidationFailed(QptError):
    error_code = "VALIDATION_FAILED"
    exit_code = 1


class NonPositiveDelta(ValidationFailed):
    error_code = "NON_POSITIVE_DELTA"


class SuperOhmicUnsupported(ValidationFailed):
    error_code = "SUPER_OHMIC_UNSUPPORTED"


class NegativeAlpha(ValidationFailed):
    error_code = "NEGATIVE_ALPHA"


class BiasOutOfRange(ValidationFailed):
    error_code = "BIAS_OUT_OF_RANGE"


class InvalidBath(ValidationFailed):
    error_code = "INVALID_BATH"


class InvalidConfig(ValidationFailed):
    error_code = "INVALID_CONFIG"


class DiscreteBathHasNoDensity(QptError):
    error_code = "DISCRETE_BATH_HAS_NO_DENSITY"


class QuadratureNotConverged(QptError):
    error_code = "QUADRATURE_NOT_CONVERGED"


class NotConverged(QptError):
    error_code = "NOT_CONVERGED"
    exit_code = 2


class DegenerateGap(QptError):
    error_code = "DEGENERATE_GAP"
    exit_code = 2


class NotInDelocalizedPhase(QptError):
    error_code = "NOT_IN_DELOCALIZED_PHASE"


class NegativeEigenvalueBeyondTolerance(QptError):
    error_code = "NEGATIVE_EIGENVALUE"


class NoSignChange(QptError):
    error_code = "NO_SIGN_CHANGE"


class InsufficientPoints(QptError):
    error_code = "INSUFFICIENT_POINTS"


class NonPositiveData(QptError):
    error_code = "NON_POSITIVE_DATA"


class DimensionTooLarge(QptError):
    error_code = "DIMENSION_TOO_LARGE"
    exit_code = 1
