"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """An argument violates one of the documented preconditions."""


class NumericalDomainError(ArithmeticError):
    """An input lies outside the numerical domain of an operation, e.g. a
    matrix that must be positive definite is not."""
