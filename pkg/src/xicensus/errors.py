"""Exception hierarchy shared by all modules.

Numerical failures derive from :class:`NumericalError`; the CLI maps those to
exit code 3.
"""

from __future__ import annotations


class XiCensusError(Exception):
    """Base class for every error raised by the package."""


class NumericalError(XiCensusError):
    """A computation could not produce a trustworthy value."""


class DomainError(NumericalError, ValueError):
    """Argument outside the domain where the evaluator is defined."""


class NonFiniteInput(DomainError):
    pass


class PoleAtOne(DomainError):
    pass


class PoleAtNonPositiveInteger(DomainError):
    pass


class NonConvergence(NumericalError):
    pass


class NearZeroDivision(NumericalError, ZeroDivisionError):
    pass


class Overflow(NumericalError, OverflowError):
    pass


# argument tracking


class ZeroOnPath(NumericalError):
    def __init__(self, message: str, where: complex | None = None):
        super().__init__(message)
        self.where = where


class MaxDepthExceeded(NumericalError):
    pass


class NonIntegerWinding(NumericalError):
    def __init__(self, message: str, winding: float):
        super().__init__(message)
        self.winding = winding


class ZeroAtCenter(NumericalError):
    pass


# census


class StepTooCoarse(NumericalError):
    pass


class ContourThroughZero(NumericalError):
    def __init__(self, message: str, suggested_height: float | None = None):
        super().__init__(message)
        self.suggested_height = suggested_height


class CensusIncomplete(NumericalError):
    pass
