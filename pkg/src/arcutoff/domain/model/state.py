"""Chain states."""

import math
import sys
from dataclasses import dataclass

import numpy as np

from ..errors import ModelValidationError, PreconditionError

UNIT_NORM_TOL = 1e-12
# largest ln n for which n itself is a finite float
MAX_LN_N = math.log(sys.float_info.max)


@dataclass(frozen=True, eq=False)
class StateVec:
    """State X_k of the chain."""
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(x)):
            raise ModelValidationError("state has non-finite entries")
        x.setflags(write=False)
        object.__setattr__(self, 'x', x)

    @property
    def d(self) -> int:
        return self.x.size

    def to_numpy(self) -> np.ndarray:
        return self.x.copy()

    def __len__(self) -> int:
        return self.x.size


@dataclass(frozen=True, eq=False)
class SphereState:
    """Strictly positive unit vector, state of the projected walk."""
    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=np.float64).reshape(-1)
        if not np.all(y > 0):
            raise PreconditionError("sphere state needs strictly positive coordinates")
        if abs(np.linalg.norm(y) - 1.0) > UNIT_NORM_TOL:
            raise ModelValidationError(f"sphere state has norm {np.linalg.norm(y)!r}")
        y.setflags(write=False)
        object.__setattr__(self, 'y', y)

    @classmethod
    def from_positive(cls, x) -> 'SphereState':
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if not np.all(x > 0):
            raise PreconditionError(f"cannot project {x.tolist()}: coordinates must be > 0")
        return cls(x / np.linalg.norm(x))

    @classmethod
    def uniform(cls, d: int) -> 'SphereState':
        return cls(np.full(d, 1.0 / np.sqrt(d)))

    @property
    def d(self) -> int:
        return self.y.size

    def to_numpy(self) -> np.ndarray:
        return self.y.copy()

    def scaled(self, ln_n: float) -> StateVec:
        """Starting point X_0 = n * y with n = exp(ln_n)."""
        if not math.isfinite(ln_n) or ln_n > MAX_LN_N:
            raise PreconditionError(f"ln_n = {ln_n} exceeds the float range (max {MAX_LN_N:.2f})")
        return StateVec(math.exp(ln_n) * self.y)

    @property
    def ratio(self) -> float:
        """min y / max y."""
        return float(self.y.min() / self.y.max())


def as_array(x) -> np.ndarray:
    """Plain float vector from a StateVec, SphereState or array-like."""
    if isinstance(x, StateVec):
        return x.x
    if isinstance(x, SphereState):
        return x.y
    return np.asarray(x, dtype=np.float64).reshape(-1)
