"""
Exception hierarchy shared by the numerical modules and the CLI.
"""

from typing import Any, Optional


class OrliczError(Exception):
    """Base class for every failure raised by orlicz-solver."""


class NonConvergence(OrliczError):
    """A scalar root search exhausted its iteration or bracketing budget."""


class QuadratureFailure(OrliczError):
    """Adaptive quadrature could not reach the requested tolerance."""


class InadmissibleExponents(OrliczError):
    """Exponents violate the hypotheses an operation depends on."""


class DimensionTooSmall(InadmissibleExponents):
    """N <= p, so the critical exponent is undefined."""


class DegenerateBump(OrliczError):
    """The bump field vanishes on every interior node."""


class GeometryFailure(OrliczError):
    """No endpoint with negative energy was found along the search ray."""


class ConfigError(OrliczError):
    """A run configuration file or command-line value is malformed."""


class BudgetExhausted(OrliczError):
    """A solver stopped before meeting its residual tolerance.

    The partial result is kept on the exception so callers can still save it.
    """

    def __init__(self, message: str, result: Optional[Any] = None):
        super().__init__(message)
        self.result = result
