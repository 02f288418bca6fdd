"""Exception hierarchy shared by every module."""


class PolaronEmissionError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(PolaronEmissionError, ValueError):
    """Invalid parameters, grids or configuration text."""


class DomainError(PolaronEmissionError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResolutionError(ConfigurationError):
    """A sampling grid is too coarse for the requested operation."""


class QuadratureError(PolaronEmissionError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class SteadyStateError(PolaronEmissionError, ArithmeticError):
    """The generator has no unique stationary state."""


class UndefinedQuantityError(PolaronEmissionError, ArithmeticError):
    """A normalised quantity is undefined, e.g. a fraction with zero denominator."""
