"""Exception hierarchy for the turan package."""

from __future__ import annotations


class TuranError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSequenceError(TuranError, ValueError):
    """A coefficient sequence violates its structural invariants."""


class RecurrenceOverflowError(TuranError, ArithmeticError):
    """Forward recurrence produced a non-finite value.

    Attributes
    ----------
    n : int
        first degree whose value was not finite
    x : float
        abscissa at which it happened
    """

    def __init__(self, n: int, x: float):
        self.n = n
        self.x = x
        super().__init__(f"non-finite value of p_{n}({x!r}) in forward recurrence")


class NormalizationError(TuranError, ValueError):
    """p_n(1) vanished or changed sign, so the sequence cannot be normalized at 1."""

    def __init__(self, n: int, value: float):
        self.n = n
        self.value = value
        super().__init__(
            f"cannot normalize at x=1: p_{n}(1)/p_{n-1}(1) = {value!r} is not positive"
        )


class PreconditionError(TuranError, ValueError):
    """Inputs do not satisfy the standing hypotheses of an operation."""


class WrongCriterionError(TuranError, ValueError):
    """The criterion does not apply to this kind of sequence."""


class FamilySpecError(TuranError, ValueError):
    """A family specification could not be parsed or has out-of-domain parameters."""
