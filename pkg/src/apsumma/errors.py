"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented invariant or precondition."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed to reach its requested tolerance."""
