"""Exception types used across the certification pipeline.

Every failure mode that can abort a rigorous computation has its own type so
callers can distinguish "the mathematics refused to certify" (e.g.
``ContractionFails``) from "the inputs were malformed" (e.g.
``DimensionMismatch``).  All inherit from :class:`TuringCertError`.
"""

from __future__ import annotations

__all__ = [
    "TuringCertError",
    "DivisionByZeroInterval",
    "EmptyIntersection",
    "NegativeBase",
    "DimensionMismatch",
    "ConvergenceFailure",
    "NotVerifiablyInvertible",
    "NoThresholdFound",
    "TruncationTooSmall",
    "SingularDenominator",
    "ContractionFails",
    "NotIdentified",
    "CannotCertifyUniqueness",
    "NeumannSeriesDiverges",
    "ComplexLeadingEigenvalue",
]


class TuringCertError(Exception):
    """Base class for all library-specific errors."""


class DivisionByZeroInterval(TuringCertError, ZeroDivisionError):
    """Interval division where the denominator encloses zero."""


class EmptyIntersection(TuringCertError):
    """An intersection that was required to be nonempty came out empty."""


class NegativeBase(TuringCertError, ValueError):
    """Real power of an interval that extends below zero."""


class DimensionMismatch(TuringCertError, ValueError):
    """Array operands with incompatible shapes."""


class ConvergenceFailure(TuringCertError):
    """A floating-point (non-rigorous) iteration failed to converge."""


class NotVerifiablyInvertible(TuringCertError):
    """The residual bound for an approximate inverse is not a contraction."""


class NoThresholdFound(TuringCertError):
    """Tail-index scan hit its hard cap without satisfying the criterion."""


class TruncationTooSmall(TuringCertError):
    """Truncation size violates a precondition of a tail bound."""


class SingularDenominator(TuringCertError):
    """A resolvent-style denominator could not be bounded away from zero."""


class ContractionFails(TuringCertError):
    """Newton-Kantorovich contraction conditions (Z1 < 1, positive
    discriminant) could not be verified."""


class NotIdentified(TuringCertError):
    """The validated eigenvalue could not be matched to the leading
    Gershgorin disk."""


class CannotCertifyUniqueness(TuringCertError):
    """Threshold band exists but the sign-change/monotonicity conditions
    for a unique crossing could not all be verified."""


class NeumannSeriesDiverges(TuringCertError):
    """Z1 + Z2*r does not stay below one, so the derivative bound's
    Neumann series cannot be summed."""


class ComplexLeadingEigenvalue(TuringCertError):
    """The numerically leading eigenvalue has an imaginary part too large
    to treat as a real eigenvalue."""
