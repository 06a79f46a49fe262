"""Cutoff schedule value object."""

from dataclasses import dataclass


@dataclass(frozen=True)
class CutoffSchedule:
    """Realized k(n, beta) = (ln n + beta*sqrt(ln n)) / (-alpha), rounded and clamped at 0."""
    ln_n: float
    beta: float
    alpha: float
    k: int
    raw: float
    clamped: bool = False

    def to_dict(self) -> dict:
        return {
            "ln_n": self.ln_n,
            "beta": self.beta,
            "alpha": self.alpha,
            "k": self.k,
            "raw": self.raw,
            "clamped": self.clamped,
        }
