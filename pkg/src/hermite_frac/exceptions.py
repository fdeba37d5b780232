"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """A documented precondition of an operation is violated."""


class NumericalError(RuntimeError):
    """A quadrature or fit failed to reach its target tolerance."""


class PrincipalValueError(NumericalError):
    """The principal-value shell check (delta-halving) did not stabilize."""

    def __init__(self, message, *, delta, value, value_halved):
        super().__init__(message)
        self.delta = delta
        self.value = value
        self.value_halved = value_halved
