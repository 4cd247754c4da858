"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """An input violates an operation's precondition."""


class NumericalFailure(ArithmeticError):
    """A computation produced a non-finite value.

    Attributes:
        step: Integration step index at which the failure was detected, if any.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class UnsupportedRegime(InvalidArgument):
    """The requested parameter regime has no representation in this routine."""
