"""Truncation policy for the backward iteration."""

from dataclasses import dataclass

from ..errors import ModelValidationError


@dataclass(frozen=True)
class TruncationPolicy:
    """Stop once `patience` consecutive increments are below `tol`, or at `max_terms`."""
    tol: float = 1e-10
    patience: int = 2
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.tol > 0:
            raise ModelValidationError("truncation tol must be > 0")
        if self.patience < 1:
            raise ModelValidationError("truncation patience must be >= 1")
        if self.max_terms < self.patience:
            raise ModelValidationError("max_terms must be >= patience")

    @classmethod
    def default_for(cls, d: int) -> 'TruncationPolicy':
        return cls(tol=1e-10, patience=d, max_terms=10_000)
