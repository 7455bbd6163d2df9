"""Exception hierarchy for the machinpi package.

Every error raised deliberately by this package derives from MachinError, so
callers (and the CLI) can distinguish mathematical/domain failures from bugs.
"""

from __future__ import annotations


class MachinError(Exception):
    """Base class for all machinpi errors."""


class DomainError(MachinError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateFormulaError(MachinError):
    """The construction collapses to an exact quadrant angle.

    Happens when the two-step iteration lands on tau = 1, i.e. the seed
    arctangent is already an exact multiple of pi/4 and no companion term
    exists.
    """


class FloorBoundaryError(MachinError):
    """A certified floor cannot be decided because the value sits on (or
    provably near) an integer boundary at every precision tried."""


class PrecisionCapError(MachinError):
    """Working precision would exceed the configured cap.

    The cap defaults to 1e6 decimal digits and can be raised with the
    MACHIN_PRECISION_CAP environment variable.
    """


class ConsistencyError(MachinError):
    """Two independent computations of the same quantity disagree."""


class BudgetError(MachinError):
    """Predicted cost of an operation exceeds the allowed budget."""


class MeasureUndefinedError(MachinError):
    """Lehmer-style measure is undefined: a term has |beta| = 1 (its
    logarithm vanishes)."""


class NegativeLogError(MachinError):
    """Lehmer-style measure summand is negative: a term has |beta| < 1."""
