"""Result objects returned by the domain services."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .state import StateVec


def _num(value: Optional[float]) -> Optional[float]:
    """JSON-safe float: non-finite values become None."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


@dataclass
class Trajectory:
    """Full forward path X_0..X_k with the indices and raw noise used."""
    states: np.ndarray
    indices: np.ndarray
    noise: np.ndarray

    @property
    def final(self) -> StateVec:
        return StateVec(self.states[-1])


@dataclass
class StationarySample:
    """One draw of the backward iteration with its truncation metadata."""
    x: StateVec
    terms_used: int
    last_increment_norm: float
    truncated_at_cap: bool


@dataclass
class StationaryBatch:
    """Many backward-iteration draws, one row per replica."""
    samples: np.ndarray
    terms: np.ndarray
    last_increment: np.ndarray
    capped: np.ndarray

    @property
    def capped_count(self) -> int:
        return int(self.capped.sum())

    def metadata(self) -> dict:
        return {
            "replicas": int(self.samples.shape[0]),
            "terms_mean": float(self.terms.mean()),
            "terms_max": int(self.terms.max()),
            "capped": self.capped_count,
        }


@dataclass
class MomentComparison:
    """Two-sample z statistics for means and second central moments."""
    z_means: np.ndarray
    z_cov: np.ndarray
    threshold: float

    @property
    def max_abs_z(self) -> float:
        return float(max(np.abs(self.z_means).max(), np.abs(self.z_cov).max()))

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.threshold

    def to_dict(self) -> dict:
        return {
            "z_means": self.z_means.tolist(),
            "z_cov": self.z_cov.tolist(),
            "max_abs_z": self.max_abs_z,
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass
class SelfTestReport:
    n_samples: int
    k_extra: int
    comparison: MomentComparison
    capped: int = 0

    @property
    def passed(self) -> bool:
        return self.comparison.passed

    def to_dict(self) -> dict:
        data = self.comparison.to_dict()
        data.update(n_samples=self.n_samples, k_extra=self.k_extra, capped=self.capped)
        return data


@dataclass
class RatioBoundReport:
    lhs: float
    rhs: float
    holds: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


@dataclass
class ExhaustiveRatioReport:
    """Worst min/max ratio over every index sequence up to max_len."""
    worst_ratio: float
    rhs: float
    holds: bool
    sequences_checked: int
    max_len: int
    worst_sequence: Tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "worst_ratio": self.worst_ratio,
            "rhs": self.rhs,
            "holds": self.holds,
            "sequences_checked": self.sequences_checked,
            "max_len": self.max_len,
            "worst_sequence": [i + 1 for i in self.worst_sequence],
        }


@dataclass
class ContractionReport:
    """Common-index coupling of two sphere walks under the Hilbert metric."""
    trials: int
    length: int
    h0: float
    max_ratio: float
    max_step_increase: float
    strict_decrease_fraction: float
    bound: float
    greedy_sequence: Tuple[int, ...]
    greedy_h_after: float

    @property
    def nonexpansive(self) -> bool:
        return self.max_step_increase <= 1e-12

    @property
    def contraction_ok(self) -> bool:
        return self.strict_decrease_fraction >= self.bound

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "length": self.length,
            "h0": self.h0,
            "max_ratio": self.max_ratio,
            "max_step_increase": self.max_step_increase,
            "strict_decrease_fraction": self.strict_decrease_fraction,
            "bound": self.bound,
            "greedy_sequence": [i + 1 for i in self.greedy_sequence],
            "greedy_h_after": self.greedy_h_after,
            "nonexpansive": self.nonexpansive,
            "contraction_ok": self.contraction_ok,
        }


@dataclass
class AlphaEstimate:
    """Ergodic average of the per-step log norm factor of the sphere walk."""
    alpha_hat: float
    std_error: float
    n_steps: int
    burn_in: int
    scan: str
    batches: int = 30
    flagged: bool = False
    references: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = {
            "alpha_hat": self.alpha_hat,
            "std_error": self.std_error,
            "n_steps": self.n_steps,
            "burn_in": self.burn_in,
            "scan": self.scan,
            "batches": self.batches,
            "flagged": self.flagged,
        }
        if self.references:
            data["references"] = dict(self.references)
        return data


@dataclass
class TailRow:
    t: float
    empirical: float
    bound: float

    def to_dict(self) -> dict:
        return {"t": self.t, "empirical": self.empirical, "bound": _num(self.bound)}


@dataclass
class ConcentrationReport:
    """Growth and tails of ln||A_{I_k}...A_{I_1} y0|| over random index sequences."""
    k: List[int]
    replicas: int
    mean: List[float]
    std: List[float]
    slope: float
    alpha_hat: float
    drift: List[float]
    gamma_hat: Optional[float]
    gamma_ls: Optional[float]
    tails: List[TailRow]

    @property
    def envelope_dominates(self) -> bool:
        return all(row.empirical <= row.bound + 1e-15 for row in self.tails)

    def to_dict(self) -> dict:
        return {
            "k": list(self.k),
            "replicas": self.replicas,
            "mean": list(self.mean),
            "std": list(self.std),
            "slope": self.slope,
            "alpha_hat": self.alpha_hat,
            "drift": list(self.drift),
            "gamma_hat": _num(self.gamma_hat),
            "gamma_ls": _num(self.gamma_ls),
            "tails": [row.to_dict() for row in self.tails],
        }


class TVEstimate(NamedTuple):
    """Total variation value and an error bound on it."""
    tv: float
    err: float


@dataclass
class CurvePoint:
    k: int
    tv: float
    err: float
    parity: int
    method: str


@dataclass
class TVCurve:
    """Exact d=2 total-variation curve for one starting scale."""
    ln_n: float
    points: List[CurvePoint]
    parity_convention: str = "parity = coordinate updated last (1-based); k=0 counts as coordinate 2"

    @property
    def ks(self) -> np.ndarray:
        return np.array([p.k for p in self.points])

    @property
    def tvs(self) -> np.ndarray:
        return np.array([p.tv for p in self.points])

    def rows(self) -> List[list]:
        return [[p.k, p.tv, p.err, p.parity + 1] for p in self.points]


@dataclass
class BallLowerBound:
    """max_R |P(X_bar in B_R) - P(X_k in B_R)| with its confidence half-width."""
    k: int
    lower: float
    lower_ci: float
    radius: float
    per_radius: List[Dict[str, float]]
    clamped: bool = False


@dataclass
class CouplingUpperBound:
    """Mean coupling failure probability, an upper bound on d_tv."""
    k: int
    upper: float
    upper_ci: float
    p_uncollected: float
    clamped: bool = False


@dataclass
class TVBracket:
    k: int
    lower: float
    lower_ci: float
    upper: float
    upper_ci: float
    clamped: bool = False

    @property
    def consistent(self) -> bool:
        return 0.0 <= self.lower <= self.upper + self.lower_ci + self.upper_ci

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "lower": self.lower,
            "lower_ci": self.lower_ci,
            "upper": self.upper,
            "upper_ci": self.upper_ci,
            "clamped": self.clamped,
        }


@dataclass
class ProfileRow:
    ln_n: float
    beta: float
    k: int
    tv_lower: Optional[float] = None
    lower_ci: Optional[float] = None
    tv_upper: Optional[float] = None
    upper_ci: Optional[float] = None
    tv_exact: Optional[float] = None
    method: str = "exact"

    def as_row(self) -> list:
        return [self.ln_n, self.beta, self.k, self.tv_lower, self.lower_ci,
                self.tv_upper, self.upper_ci, self.tv_exact, self.method]


@dataclass
class CutoffProfile:
    rows: List[ProfileRow]
    alpha: float
    alpha_source: str
    crossings: List[Optional[float]] = field(default_factory=list)
    spacings: List[float] = field(default_factory=list)
    predicted_spacings: List[float] = field(default_factory=list)

    @property
    def mean_spacing(self) -> Optional[float]:
        return float(np.mean(self.spacings)) if self.spacings else None

    def summary(self) -> dict:
        return {
            "alpha": self.alpha,
            "alpha_source": self.alpha_source,
            "crossings": [_num(c) for c in self.crossings],
            "spacings": list(self.spacings),
            "predicted_spacings": list(self.predicted_spacings),
            "mean_spacing": _num(self.mean_spacing),
        }
