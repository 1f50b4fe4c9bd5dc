"""Shared exception types mapped to CLI exit codes."""


class ValidationError(ValueError):
    """Malformed input, violated precondition, or inconsistent arguments (exit 2)."""


class InfeasibleError(ValidationError):
    """Constraint cannot be met, e.g. a rate above channel capacity."""


class BudgetError(RuntimeError):
    """Exact enumeration would exceed the configured size budget (exit 3)."""
