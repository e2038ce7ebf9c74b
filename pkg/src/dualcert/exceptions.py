"""Exception types raised across the package."""


class DualCertError(Exception):
    """Base class for all package errors."""


class DomainError(DualCertError, ValueError):
    """An argument lies outside the domain of an operation."""


class UnsupportedPairError(DualCertError, TypeError):
    """Two distribution descriptors cannot be compared by this library."""


class NoDominatingPairError(DualCertError, TypeError):
    """A (mechanism, relation) combination has no dominating pair here.

    Callers should fall back to the profile-level API
    (:func:`dualcert.mechanisms.mechanism_profile`).
    """


class IncompatibleGridError(DualCertError, ValueError):
    """Two privacy loss distributions live on different loss grids."""


class RangeTooSmallError(DualCertError, ValueError):
    """A loss range truncates more probability than the tail budget allows."""

    def __init__(self, message, truncated_mass):
        super().__init__(message)
        self.truncated_mass = truncated_mass


class ExtrapolationError(DualCertError, ValueError):
    """A tabulated privacy profile was queried outside its domain."""


class MonotonicityError(DualCertError, RuntimeError):
    """Certificate margins increased along a radius sweep.

    This always indicates a bug in the privacy profiles that were supplied.
    """


class NumericFailure(DualCertError, ArithmeticError):
    """A numerical routine did not reach its accuracy target."""

    def __init__(self, message, error_bound=float("nan")):
        super().__init__(message)
        self.error_bound = error_bound
