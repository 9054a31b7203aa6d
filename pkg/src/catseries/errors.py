"""Exception hierarchy shared by every catseries module."""

from __future__ import annotations


class CatSeriesError(Exception):
    """Base class for all errors raised by catseries."""


class UsageError(CatSeriesError, ValueError):
    """A caller violated an operation's contract (bad name, m out of range, ...)."""


class DomainError(CatSeriesError, ValueError):
    """A numeric argument lies outside the mathematical domain of an operation."""


class PrecisionError(CatSeriesError, ArithmeticError):
    """Inputs are too imprecise for the requested computation."""


class StrategyError(CatSeriesError):
    """The requested summation strategy does not apply to this series."""


class ConvergenceError(CatSeriesError):
    """A summation did not reach its target accuracy within the term budget.

    ``best`` holds the most accurate estimate obtained before giving up.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
