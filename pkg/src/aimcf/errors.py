"""Exception and warning types shared across the package."""

from __future__ import annotations


class AimError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AimError):
    """A configuration object or input file violates a structural invariant."""


class CenterMismatch(AimError):
    """Arithmetic attempted between series expanded at different centers."""


class SingularPivot(AimError):
    """Division by a series whose constant term is numerically zero.

    ``classification`` distinguishes an identically-zero divisor
    (``"exact-zero"``, typically a terminating ladder) from a divisor that
    merely vanishes at the expansion point (``"small-pivot"``, a pole of the
    logarithmic derivative).
    """

    def __init__(self, message: str, classification: str | None = None):
        super().__init__(message)
        self.classification = classification


class OrderExhausted(AimError):
    """Not enough retained Taylor orders to carry out the operation."""


class ParseOrEvalError(AimError):
    """Expression text could not be parsed, or evaluation is ill-posed."""


class IndexOutOfRange(AimError):
    """A sequence index lies outside the computed depth range."""


class ZeroDenominator(AimError):
    """A denominator value required to be nonzero vanished."""


class ZeroPartialNumerator(AimError):
    """A partial numerator is zero where the transform needs its inverse."""


class ZeroQ(AimError):
    """A second-kind recurrence coefficient q_n is zero where division by it is required."""


class ZeroP(AimError):
    """A first-kind recurrence coefficient p_n is zero where division by it is required."""


class ZeroB0(AimError):
    """The leading expansion coefficient b_0 is zero; the characteristic equation degenerates."""


class NonPositiveP(AimError):
    """A positivity hypothesis on the partial denominators is violated."""


class HypothesisViolated(AimError):
    """Input falls outside the hypothesis set of the theorem being checked."""


class NoConvergence(AimError):
    """An iterative estimate failed to stabilise within the allowed schedule."""


class InsufficientData(AimError):
    """Too few samples to run the requested fit or classification."""


class DegenerateDenominator(AimError):
    """A denominator in a closed-form coefficient expression vanishes identically."""


class Overflow(AimError):
    """A computed value is not representable in double precision."""


class AimWarning(UserWarning):
    """Base class for all warnings emitted by this package."""


class ConditioningWarning(AimWarning):
    """A pivot or scale is small enough that results may lose accuracy."""


class DegenerateDeltaWarning(AimWarning):
    """The termination quantity vanishes identically; no root bracketing is possible."""


class DeterminantMismatchWarning(AimWarning):
    """The two determinant forms disagree beyond the requested tolerance."""


class GridPointSkippedWarning(AimWarning):
    """A scan point was skipped because the ladder could not be evaluated there."""


class DepthRecheckWarning(AimWarning):
    """A root could not be re-bracketed at the deeper recheck level."""
