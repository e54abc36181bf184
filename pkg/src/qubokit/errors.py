"""Shared exception types."""


class ResourceLimitError(RuntimeError):
    """Raised when a request exceeds the desk-scale resource guards."""


class InfeasibleConstraintError(ValueError):
    """Raised when a constraint or component set cannot be satisfied at all."""


class SingularBasisError(RuntimeError):
    """Raised when the simplex basis becomes numerically singular."""
