"""Bivariate Gaussian law."""

from dataclasses import dataclass

import numpy as np

from ..errors import ModelValidationError

SYM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Gaussian2:
    """Mean and covariance of a (possibly degenerate) bivariate normal."""
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).reshape(-1)
        cov = np.array(self.cov, dtype=np.float64)
        if mean.shape != (2,) or cov.shape != (2, 2):
            raise ModelValidationError(
                f"Gaussian2 needs a 2-vector and a 2x2 matrix, got {mean.shape} and {cov.shape}"
            )
        if abs(cov[0, 1] - cov[1, 0]) > SYM_TOL * max(1.0, np.abs(cov).max()):
            raise ModelValidationError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov).min() < -SYM_TOL * max(1.0, np.abs(cov).max()):
            raise ModelValidationError("covariance is not positive semidefinite")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'cov', cov)

    @classmethod
    def point_mass(cls, x) -> 'Gaussian2':
        return cls(np.asarray(x, dtype=np.float64), np.zeros((2, 2)))

    def is_singular(self, tol: float = 1e-14) -> bool:
        return bool(np.linalg.eigvalsh(self.cov).min() <= tol * max(1.0, np.abs(self.cov).max()))

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "cov": self.cov.tolist()}
