"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class CapacityError(ValidationError):
    """Register is too large for dense construction."""


class NumericalError(RuntimeError):
    """A linear-algebra routine produced an unusable result."""


class CorrespondenceError(AssertionError):
    """A spin-side value disagrees with its game-side counterpart."""
