"""Exception types raised across the toolkit."""


class CvgmeError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CvgmeError, ValueError):
    """A numeric argument lies outside the domain of the operation."""


class UsageError(CvgmeError, ValueError):
    """Arguments are inconsistent (bad indices, empty lists, wrong sizes)."""


class InvalidCovarianceError(CvgmeError, ValueError):
    """Matrix is not an admissible covariance matrix."""


class DegenerateFilterError(CvgmeError, ValueError):
    """A local projection annihilates the state."""


class BracketError(CvgmeError, ValueError):
    """Threshold search was given an interval without a sign change."""


class NumericalError(CvgmeError, RuntimeError):
    """A numerical routine failed to converge or lost accuracy."""
