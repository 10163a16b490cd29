"""Exact computations around the minimum orbit dimension ``u = min dim g.v``
for Chevalley Lie algebras over F_p, with the supporting root-system,
finite-field and graded-polynomial machinery."""

from liebound.errors import BudgetExceeded, InputError, InvariantViolation, UnsupportedError

__version__ = "0.1.0"

__all__ = ["BudgetExceeded", "InputError", "InvariantViolation", "UnsupportedError", "__version__"]
