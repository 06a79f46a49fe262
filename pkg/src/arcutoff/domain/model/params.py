"""Model parameters: damping factors, noise scales, noise law."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ModelValidationError
from .noise import NoiseSpec


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Damping factors e_i in (0,1), noise scales sigma_i > 0 and the noise law."""
    e: np.ndarray
    sigma: np.ndarray
    noise: NoiseSpec = field(default_factory=NoiseSpec.gaussian)

    def __post_init__(self):
        e = np.array(self.e, dtype=np.float64).reshape(-1)
        sigma = np.array(self.sigma, dtype=np.float64).reshape(-1)
        if e.shape != sigma.shape:
            raise ModelValidationError(
                f"e has {e.size} entries but sigma has {sigma.size}"
            )
        if not np.all((e > 0) & (e < 1)):
            raise ModelValidationError(f"damping factors must lie in (0,1), got {e.tolist()}")
        if not np.all(np.isfinite(sigma) & (sigma > 0)):
            raise ModelValidationError(f"noise scales must be > 0, got {sigma.tolist()}")
        e.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, 'e', e)
        object.__setattr__(self, 'sigma', sigma)

    @property
    def d(self) -> int:
        return self.e.size

    @classmethod
    def uniform(cls, d: int, e: float, sigma: float = 1.0,
                noise: NoiseSpec = None) -> 'ModelParams':
        return cls(np.full(d, e), np.full(d, sigma), noise or NoiseSpec.gaussian())

    def to_dict(self) -> dict:
        return {
            "e": self.e.tolist(),
            "sigma": self.sigma.tolist(),
            "noise": self.noise.to_dict(),
        }
