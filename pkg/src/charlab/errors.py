class PreconditionError(ValueError):
    """Raised when an input violates an operation's precondition."""


class InvariantError(RuntimeError):
    """Raised when a computed quantity breaks an invariant that must always hold."""
