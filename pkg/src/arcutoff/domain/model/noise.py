"""Noise law of the additive term b_i(Z)."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict

import numpy as np
from scipy import integrate, stats
from scipy.special import ndtr

from ..errors import ModelValidationError

DENSITY_TOL = 1e-6


class NoiseKind(str, Enum):
    """Supported noise families."""
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    LAPLACE = "laplace"


@dataclass(frozen=True, eq=False)
class NoiseSpec:
    """Absolutely continuous noise law with density, sampler and mean.

    Parameters (all optional):
        gaussian: loc
        uniform:  loc, half_width (support [loc - h, loc + h], default h = 1)
        laplace:  loc, scale (default 1)

    Every supported family has a finite log-moment.
    """
    kind: NoiseKind = NoiseKind.GAUSSIAN
    params: Dict[str, float] = field(default_factory=dict)
    _dist: Any = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            kind = NoiseKind(self.kind)
        except ValueError:
            raise ModelValidationError(f"unsupported noise kind {self.kind!r}") from None
        object.__setattr__(self, 'kind', kind)
        params = {k: float(v) for k, v in dict(self.params or {}).items()}
        allowed = {
            NoiseKind.GAUSSIAN: {"loc"},
            NoiseKind.UNIFORM: {"loc", "half_width"},
            NoiseKind.LAPLACE: {"loc", "scale"},
        }[kind]
        unknown = set(params) - allowed
        if unknown:
            raise ModelValidationError(f"unknown {kind.value} noise params: {sorted(unknown)}")
        object.__setattr__(self, 'params', params)
        loc = params.get("loc", 0.0)
        if kind is NoiseKind.GAUSSIAN:
            dist = stats.norm(loc=loc, scale=1.0)
        elif kind is NoiseKind.UNIFORM:
            h = params.get("half_width", 1.0)
            if h <= 0:
                raise ModelValidationError("uniform half_width must be > 0")
            dist = stats.uniform(loc=loc - h, scale=2 * h)
        else:
            b = params.get("scale", 1.0)
            if b <= 0:
                raise ModelValidationError("laplace scale must be > 0")
            dist = stats.laplace(loc=loc, scale=b)
        object.__setattr__(self, '_dist', dist)
        self._check_density()

    def _check_density(self) -> None:
        lo, hi = self._dist.support()
        loc = self.loc
        # split at loc: the laplace density has a kink there
        left, _ = integrate.quad(self._dist.pdf, lo, loc)
        right, _ = integrate.quad(self._dist.pdf, loc, hi)
        if abs(left + right - 1.0) > DENSITY_TOL:
            raise ModelValidationError(
                f"{self.kind.value} density integrates to {left + right:.9f}"
            )

    @classmethod
    def gaussian(cls) -> 'NoiseSpec':
        return cls(NoiseKind.GAUSSIAN)

    @property
    def loc(self) -> float:
        return self.params.get("loc", 0.0)

    @property
    def mean(self) -> float:
        return float(self._dist.mean())

    @property
    def variance(self) -> float:
        return float(self._dist.var())

    @property
    def is_gaussian(self) -> bool:
        return self.kind is NoiseKind.GAUSSIAN

    def density(self, z):
        return self._dist.pdf(z)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind is NoiseKind.GAUSSIAN:
            return self.loc + rng.standard_normal(size)
        return self._dist.rvs(size=size, random_state=rng)

    def translation_tv_1d(self, w) -> np.ndarray:
        """Total variation between the law and its translate by w."""
        w = np.abs(np.asarray(w, dtype=np.float64))
        if self.kind is NoiseKind.GAUSSIAN:
            return 2.0 * ndtr(w / 2.0) - 1.0
        if self.kind is NoiseKind.UNIFORM:
            return np.minimum(1.0, w / (2.0 * self.params.get("half_width", 1.0)))
        return 1.0 - np.exp(-w / (2.0 * self.params.get("scale", 1.0)))

    def translation_tv(self, w) -> np.ndarray:
        """TV between the d-fold product law and its translate by w (last axis).

        Exact for Gaussian noise; subadditive bound min(1, sum_i tv_1d(w_i))
        for the other families.
        """
        w = np.asarray(w, dtype=np.float64)
        if self.kind is NoiseKind.GAUSSIAN:
            return 2.0 * ndtr(np.linalg.norm(w, axis=-1) / 2.0) - 1.0
        return np.minimum(1.0, self.translation_tv_1d(w).sum(axis=-1))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "params": dict(self.params)}
