"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(RuntimeError):
    """A request exceeds a desk-scale complexity guard."""


class NumericError(ArithmeticError):
    """An iterative numerical procedure failed to converge."""
