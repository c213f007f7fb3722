"""Exception types shared across the package."""


class ConfigError(ValueError):
    """An experiment or ring configuration is invalid or inconsistent."""


class CollisionError(RuntimeError):
    """Two neighboring particles came closer than the collision guard.

    The inverse-square repulsion makes real collisions impossible from the
    uniform rest start, so this always signals a numerical fault.
    """


class StiffnessError(RuntimeError):
    """The adaptive integrator's step size underflowed."""


class DegenerateSeriesError(RuntimeError):
    """A coefficient table has too few usable tail entries for a radius fit.

    Radius estimation reports this condition through the ``degenerate`` flag
    on the estimate instead of raising; the class exists for callers that
    want to promote the flag to an exception.
    """
