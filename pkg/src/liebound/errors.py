"""Exception types shared across the package.

The CLI maps each class to a fixed exit code, so library code raises these
instead of bare ``ValueError``/``RuntimeError`` whenever the distinction
matters to a caller.
"""


class InputError(ValueError):
    """Malformed or unsupported input (exit code 2)."""


class UnsupportedError(InputError):
    """The operation needs classification data that a custom input lacks."""


class BudgetExceeded(RuntimeError):
    """A computation would exceed its configured size budget (exit code 3)."""


class InvariantViolation(AssertionError):
    """A cross-check between two independent computations failed (exit code 1)."""
