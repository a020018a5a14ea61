"""Exception types shared across the simulator."""


class PhysicsError(Exception):
    """Violation of a physical precondition or invariant during simulation."""


class PreconditionError(PhysicsError):
    """An operation was applied to a state it is not defined on."""


class LeakageError(PhysicsError):
    """Population escaped the subspace an effective model is valid on."""


class NormalizationError(PhysicsError):
    """A state vector drifted away from unit norm."""
