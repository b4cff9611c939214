"""Exception hierarchy shared across the package."""


class BidiformsError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidInput(BidiformsError):
    """Malformed or out-of-contract input (dimension mismatch, bad indices, ...)."""


class NotCoxRegular(BidiformsError):
    """A Gabrielov step would require a non-integral column update."""


class NotNonNegative(BidiformsError):
    """Operation requires a non-negative quadratic form."""


class NotTypeC(BidiformsError):
    """Operation requires a form of Dynkin type C."""


class NotIncidenceForm(BidiformsError):
    """The form cannot be realized as an incidence form of a bidirected graph."""


class NotPositive(BidiformsError):
    """Operation requires a positive incidence form (tree or unbalanced 1-tree)."""


class RadicalRoot(BidiformsError):
    """Reflection requested at a vector of value zero."""


class UnrepresentedWithinBound(BidiformsError):
    """No solution of q(x)=d was found within the search bound."""

    def __init__(self, d, bound):
        super().__init__(f"no representation of {d} found within coordinate bound {bound}")
        self.d = d
        self.bound = bound


class GentlenessViolation(BidiformsError):
    """A quiver presentation violates the gentle-algebra conditions."""


class InfiniteDimensional(BidiformsError):
    """The presentation admits arbitrarily long relation-avoiding paths."""


class InfiniteGlobalDimensionSuspected(BidiformsError):
    """Thread occurrence counts are off; the algebra likely has infinite global dimension."""


class AmbiguousMatching(BidiformsError):
    """The forbidden-to-permitted thread matching could not be resolved uniquely."""


class InconsistentPresentation(BidiformsError):
    """Internal identities of the Euler-form pipeline failed for the presentation."""
