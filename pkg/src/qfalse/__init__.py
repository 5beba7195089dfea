"""Exact truncated q-series and checks of false theta, Bailey and multisum identities."""

from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    NegativeLengthError,
    NotInvertibleError,
    PrecisionError,
    QFalseError,
    WitnessViolationError,
)
from .report import TOOL_VERSION, NumericReport, VerificationReport
from .series import ComparisonResult, QSeries, add, coeff_at, compare_up_to, invert, mul, power, truncate

__version__ = TOOL_VERSION

__all__ = [
    "ComparisonResult",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "NegativeLengthError",
    "NotInvertibleError",
    "NumericReport",
    "PrecisionError",
    "QFalseError",
    "QSeries",
    "VerificationReport",
    "WitnessViolationError",
    "add",
    "coeff_at",
    "compare_up_to",
    "invert",
    "mul",
    "power",
    "truncate",
]
