"""Exception types shared across the package."""


class BglsError(Exception):
    """Base class for all package errors."""


class ValidationError(BglsError, ValueError):
    """Invalid parameters or violated preconditions."""


class DivergenceError(BglsError, ArithmeticError):
    """A norm or integral is infinite or failed to converge."""


class InvariantError(BglsError, AssertionError):
    """An internal consistency check failed."""
