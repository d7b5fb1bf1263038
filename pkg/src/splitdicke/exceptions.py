"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument is outside the domain of the operation."""


class ResourceLimitError(RuntimeError):
    """The requested problem size exceeds a built-in guard."""


class DegenerateStateError(ValueError):
    """A quantity needed as a divisor vanishes for the given state."""


class DomainError(ValueError):
    """A matrix function was applied outside its domain."""
