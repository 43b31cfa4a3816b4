"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed or out-of-contract input."""


class ResourceLimitError(RuntimeError):
    """A size guard was exceeded (2^n tables, enumeration, LP size)."""


class UndefinedQuantityError(ArithmeticError):
    """The requested quantity does not exist for this input (e.g. empty promise)."""


class InvariantViolation(AssertionError):
    """An internally checked mathematical invariant failed."""
