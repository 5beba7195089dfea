"""Exception hierarchy shared by every module of the package."""


class QFalseError(Exception):
    """Base class for all package errors."""


class PrecisionError(QFalseError, ValueError):
    """A coefficient or truncation was requested at or beyond the known precision."""


class DomainError(QFalseError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotInvertibleError(DomainError):
    pass


class DivergenceError(DomainError):
    """An infinite product whose factors do not tend to 1 q-adically."""


class NegativeLengthError(DomainError):
    pass


class WitnessViolationError(QFalseError):
    """A multi-sum term escaped the declared termination bound."""


class ConvergenceError(QFalseError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
