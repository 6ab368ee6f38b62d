"""Exception hierarchy shared by every module of the package."""

__all__ = [
    "WgdError",
    "NotSymmetric",
    "NotPositiveDefinite",
    "SingularMatrix",
    "DomainError",
    "ParameterOutOfRange",
    "NonpositiveDensity",
    "NoTaylorExpansion",
    "DivergentIntegral",
    "SeriesError",
    "TruncationExceeded",
    "DivergenceSuspected",
    "AlternatingSeriesNotConverged",
    "NoRoot",
]


class WgdError(Exception):
    """Base class for all errors raised by :mod:`wgd`."""


class NotSymmetric(WgdError, ValueError):
    """Input matrix is not symmetric within tolerance."""


class NotPositiveDefinite(WgdError, ValueError):
    """Input matrix has a non-positive eigenvalue or failed Cholesky."""


class SingularMatrix(WgdError, ValueError):
    """Matrix is numerically singular where an inverse is required."""


class DomainError(WgdError, ValueError):
    """Argument lies outside the domain of a function."""


class ParameterOutOfRange(WgdError, ValueError):
    """Distribution or generator parameter violates its constraint."""


class NonpositiveDensity(WgdError, ValueError):
    """A density generator is evaluated where it is not strictly positive."""


class NoTaylorExpansion(WgdError):
    """Generator has no usable Taylor expansion at the origin."""


class DivergentIntegral(WgdError):
    """A radial integral does not exist for the requested parameters."""


class SeriesError(WgdError):
    """Base class for failures of a truncated series.

    The partial result, when available, is attached as ``partial``.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class TruncationExceeded(SeriesError):
    """Series did not meet its tolerance within the allowed degree."""


class DivergenceSuspected(SeriesError):
    """Series layers kept growing past half the allowed degree."""


class AlternatingSeriesNotConverged(SeriesError):
    """Alternating series failed the decreasing-magnitude test."""


class NoRoot(WgdError):
    """Scalar estimating equation has no root in the searched range."""
