"""Exception hierarchy.

All arithmetic is exact.  Python integers never overflow, but the
compiled scan kernels work on 64-bit machine words, so every public
constructor rejects coordinates outside a fixed desk-scale window
(|x| <= 2**20) with ArithmeticOverflow.  Inside that window every
intermediate value of the kernels provably fits in int64.
"""

COORD_BOUND = 1 << 20


class KatofanError(Exception):
    """Base class for all library errors."""


class ArithmeticOverflow(KatofanError):
    """Input coordinates exceed the supported fixed-width range."""


class ElementNotInMonoid(KatofanError):
    """Membership precondition failed (e.g. localizing at a non-element)."""


class NotAnIdeal(KatofanError):
    """The generating set is not closed under addition by monoid elements."""


class NotSharp(KatofanError):
    """A sharp monoid was required but the input has nontrivial units."""


class NotSaturated(KatofanError):
    """A saturated monoid was required."""


class NotStronglyConvex(KatofanError):
    """The cone contains a line."""


class NotSimplicial(KatofanError):
    """Ray count differs from dimension."""


class InvalidFan(KatofanError):
    """The cone collection violates the fan axioms."""


class VectorOutsideSupport(KatofanError):
    """Subdivision center does not lie in the support of the fan."""


class ResolutionBudgetExceeded(KatofanError):
    """The stellar-move budget ran out before all cones became unimodular."""


class NotContained(KatofanError):
    """Cone extraction requires the target cone to lie inside the source cone."""


class HypothesisViolated(KatofanError):
    """A stalk map required to be surjective is not."""


class InvalidInput(KatofanError):
    """Structurally invalid input to an operation."""


class DimensionMismatch(KatofanError):
    """Matrix or basis dimensions do not agree."""


class NotNilpotent(KatofanError):
    """The operator is not nilpotent."""


class InvalidPunctureCount(KatofanError):
    """Puncture count must be >= 1."""


class ParseError(KatofanError):
    """Malformed input document."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class InvariantViolation(KatofanError):
    """A declared entity violates one of its invariants."""

    def __init__(self, entity, invariant):
        super().__init__(f"entity {entity!r} violates invariant: {invariant}")
        self.entity = entity
        self.invariant = invariant


def check_coords(vectors, what="coordinate"):
    """Reject coordinates outside the supported fixed-width window."""
    for vec in vectors:
        for x in vec:
            if x > COORD_BOUND or x < -COORD_BOUND:
                raise ArithmeticOverflow(
                    f"{what} {x} outside supported range [-2^20, 2^20]"
                )
