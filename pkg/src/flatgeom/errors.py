"""Exception hierarchy shared by all flatgeom modules."""


class FlatgeomError(Exception):
    """Base class for all errors raised by this package."""


class InvalidElement(FlatgeomError):
    """An element id is not part of the ground set."""


class GroundTooLarge(FlatgeomError):
    """An exhaustive check would exceed its configured bound and no
    sampling fallback was requested."""


class NoLargeCircuit(FlatgeomError):
    """The matroid has no circuit of size greater than 2, so the
    circuit-parameter machinery does not apply."""


class NotIndependent(FlatgeomError):
    """A tuple required to be independent (possibly over a base set) is not."""


class EmptyCollection(FlatgeomError):
    """An inclusion-exclusion value was requested for an empty collection."""


class InvalidConfig(FlatgeomError):
    """A ping-pong configuration violates its invariants."""


class InvalidSequence(FlatgeomError):
    """A ping-pong sequence violates the step rule."""


class InvalidStructure(FlatgeomError):
    """A relational structure or scenario fails validation."""


class IncoherentSchedule(FlatgeomError):
    """Stage schedules are inconsistent with each other or the horizon."""


class NotExtendable(FlatgeomError):
    """A tuple cannot be extended to a basis (it is dependent)."""


class ProfileInvalid(FlatgeomError):
    """A theory profile fails its inequality constraints."""


class MatroidContractError(FlatgeomError):
    """Two computations that must agree on a valid matroid disagreed,
    indicating a broken oracle."""


class InputError(FlatgeomError):
    """Malformed external input (JSON files, CLI values)."""
