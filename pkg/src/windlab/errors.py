"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class CapacityError(RuntimeError):
    """An exhaustive enumeration would exceed the stated budget.

    Carries a remediation hint (usually: switch to the transfer method).
    """
