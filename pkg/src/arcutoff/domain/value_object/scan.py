"""Scan policy value object.

Indices are 0-based inside the package. Configuration files and the CLI use
1-based indices; conversion happens in ``infrastructure.config``.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ..errors import ModelValidationError, PreconditionError


class ScanMode(str, Enum):
    """How the updated coordinate is chosen."""
    RANDOM = "random-scan"
    CYCLE = "deterministic-cycle"
    SEQUENCE = "explicit-sequence"


@dataclass(frozen=True)
class ScanPolicy:
    """Rule selecting the coordinate updated at each step."""
    mode: ScanMode = ScanMode.RANDOM
    sequence: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'mode', ScanMode(self.mode))
        if self.mode is ScanMode.SEQUENCE:
            if not self.sequence:
                raise ModelValidationError("explicit-sequence scan needs a non-empty sequence")
            object.__setattr__(self, 'sequence', tuple(int(i) for i in self.sequence))
        elif self.sequence is not None:
            object.__setattr__(self, 'sequence', None)

    @classmethod
    def random(cls) -> 'ScanPolicy':
        return cls(ScanMode.RANDOM)

    @classmethod
    def cycle(cls) -> 'ScanPolicy':
        return cls(ScanMode.CYCLE)

    @classmethod
    def explicit(cls, sequence) -> 'ScanPolicy':
        return cls(ScanMode.SEQUENCE, tuple(sequence))

    @property
    def is_random(self) -> bool:
        return self.mode is ScanMode.RANDOM

    def validate(self, d: int) -> None:
        """Check explicit entries against the dimension."""
        if self.sequence is not None:
            bad = [i + 1 for i in self.sequence if not 0 <= i < d]
            if bad:
                raise ModelValidationError(
                    f"scan sequence entries {bad} outside 1..{d} (1-based)"
                )

    def require_coverage(self, d: int) -> None:
        """The stationary law needs every coordinate updated within a period."""
        if self.sequence is not None:
            missing = sorted(set(range(d)) - set(self.sequence))
            if missing:
                raise PreconditionError(
                    f"scan sequence never updates coordinates {[i + 1 for i in missing]}"
                )

    def period(self, d: int) -> Tuple[int, ...]:
        """The repeating index pattern of a deterministic scan."""
        if self.mode is ScanMode.CYCLE:
            return tuple(range(d))
        if self.mode is ScanMode.SEQUENCE:
            return self.sequence
        raise ValueError("random scan has no period")

    def indices(self, d: int, k: int, rng: Optional[np.random.Generator] = None,
                start: int = 0) -> np.ndarray:
        """Indices for steps start+1 .. start+k."""
        if self.is_random:
            if rng is None:
                raise ValueError("random scan needs a generator")
            return rng.integers(0, d, size=k)
        pattern = np.asarray(self.period(d), dtype=np.int64)
        return pattern[(start + np.arange(k)) % len(pattern)]

    def backward_indices(self, d: int, m: int, phase: int = 0,
                         rng: Optional[np.random.Generator] = None) -> np.ndarray:
        """Indices I_1, I_2, ... of the backward iteration, most recent update first.

        ``phase`` is the number of forward steps taken modulo the period.
        """
        if self.is_random:
            if rng is None:
                raise ValueError("random scan needs a generator")
            return rng.integers(0, d, size=m)
        pattern = np.asarray(self.period(d), dtype=np.int64)
        return pattern[(phase - 1 - np.arange(m)) % len(pattern)]

    def to_dict(self) -> dict:
        data = {"mode": self.mode.value}
        if self.sequence is not None:
            data["sequence"] = [i + 1 for i in self.sequence]
        return data
