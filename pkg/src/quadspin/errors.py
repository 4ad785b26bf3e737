"""Exception types shared across the package."""


class QuadspinError(Exception):
    """Base class for all errors raised by quadspin."""


class ValidationError(QuadspinError, ValueError):
    """Bad user input: malformed config, wrong dimensions, invalid parameters."""


class InvariantViolation(QuadspinError, ArithmeticError):
    """A numerical invariant (trace, positivity, Robertson bound, ...) was broken."""
