"""Exception types raised by the laboratory.

Every error carries a plain-English message. Errors that describe a bad value
passed by the caller also subclass :class:`ValueError` so generic callers can
catch them without importing this module.
"""

from __future__ import annotations


class LabError(Exception):
    """Base class for all laboratory errors."""


class BlockMismatchError(LabError, ValueError):
    """Block sizes do not sum to the dimension of the ambient algebra."""


class IndexOutOfRangeError(LabError, IndexError):
    """A matrix or permutation index lies outside the admissible range."""


class DuplicateIndexError(LabError, ValueError):
    """An index tuple that must be strictly increasing repeats or decreases."""


class ShapeMismatchError(LabError, ValueError):
    """A polynomial was combined with, or evaluated at, a matrix of another shape."""


class InvalidRangeError(LabError, ValueError):
    """Family parameters violate 1 <= p <= q or the column bound."""


class NotHomogeneousError(LabError, ValueError):
    """A composite generator mixes monomials of different degrees."""


class DegreeMismatchError(LabError, ValueError):
    """Numerator and denominator of a rational map have different degrees."""


class DependentPairError(LabError, ValueError):
    """Numerator and denominator of a rational map are numerically proportional."""


class LogPowerOverflowError(LabError, OverflowError):
    """A log-polynomial term exceeds the maximal supported power of log z."""


class BothZeroError(LabError, ValueError):
    """The eigen constants (lambda, mu) are both zero."""


class DegenerateSampleError(LabError, RuntimeError):
    """Sampling could not find an admissible point within the resampling budget."""


class NotInvariantError(LabError):
    """A function is not invariant along the isotropy algebra.

    Quotient comparisons report this condition instead of raising it; the class
    exists so callers that require descent can escalate the report.
    """


class AmbiguousCaseWarning(UserWarning):
    """Two complex constants were treated as equal because they agree within tolerance."""
