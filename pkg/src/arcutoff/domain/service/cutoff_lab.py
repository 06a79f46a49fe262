"""
Cutoff experiments: the schedule k(n, beta) and total-variation brackets.

Lower bound: a single event {|X| <= R} separates pi_k from pi, so
|P(X_bar in B_R) - P(X_k in B_R)| <= d_tv for every R.

Upper bound: couple X_k with a stationary copy X'_k driven by the same
indices. Once every coordinate has been selected (coupon-collector time
T <= k) the noise at the last selection times can be translated so that
the two chains meet; the failure probability is the translation TV of the
noise law by w = G^{-1} s, with s = A_{I_k}...A_{I_1}(x0 - X'_0) and
G[:, i] = A_{I_k}...A_{I_{k_i+1}} sigma_i e_i (k_i the last time i is chosen).
Ordered by last selection time, G is lower triangular with sigma on the
diagonal.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb, ndtri

from ..errors import PreconditionError
from ..model.network import Network
from ..model.params import ModelParams
from ..model.reports import (
    BallLowerBound,
    CouplingUpperBound,
    CutoffProfile,
    ProfileRow,
    TVBracket,
)
from ..model.state import SphereState, as_array
from ..value_object.scan import ScanMode, ScanPolicy
from ..value_object.schedule import CutoffSchedule
from .gaussian_exact import crossing_k, tv_curve_exact
from .model_core import check_model, simulate_forward_batch
from .replica_streams import (
    DEFAULT_CHUNK,
    StreamTag,
    check_seed,
    concat_chunks,
    map_chunks,
    replica_rng,
)
from .stationary_sampler import sample_stationary_batch
from ...infrastructure.logging import get_logger

logger = get_logger(__name__)

MIN_REPLICAS = 1000
DEFAULT_CONFIDENCE = 0.9999
RADIUS_COUNT = 10


def schedule_k(ln_n: float, beta: float, alpha: float) -> CutoffSchedule:
    """k(n, beta) = (ln n + beta sqrt(ln n)) / (-alpha), rounded half to even, clamped at 0."""
    if not alpha < 0:
        raise PreconditionError(f"alpha must be negative, got {alpha}")
    if not ln_n > 0:
        raise PreconditionError(f"ln_n must be positive, got {ln_n}")
    raw = (ln_n + beta * math.sqrt(ln_n)) / (-alpha)
    clamped = raw < 0
    if clamped:
        logger.warning("schedule clamped at k=0", ln_n=ln_n, beta=beta, raw=raw)
    return CutoffSchedule(ln_n=ln_n, beta=beta, alpha=alpha, k=0 if clamped else int(round(raw)),
                          raw=raw, clamped=clamped)


def _phase(scan: ScanPolicy, d: int, k: int) -> int:
    return 0 if scan.is_random else k % len(scan.period(d))


def _two_sided_z(confidence: float, tests: int = 1) -> float:
    return float(ndtri(1.0 - (1.0 - confidence) / (2.0 * tests)))


def default_radius_grid(stationary: np.ndarray, count: int = RADIUS_COUNT) -> np.ndarray:
    """Log-spaced radii between the 50th and 99.9th percentile stationary norms."""
    norms = np.linalg.norm(stationary, axis=1)
    lo, hi = np.percentile(norms, [50.0, 99.9])
    if not lo > 0:
        lo = hi if hi > 0 else 1.0
    return np.geomspace(lo, max(hi, lo), count)


def stationary_reference(net: Network, params: ModelParams, scan: ScanPolicy, k: int,
                         replicas: int, seed: int, tag: StreamTag, threads: int = 1
                         ) -> np.ndarray:
    """Stationary draws at the phase matching step k."""
    phase = _phase(scan, net.d, k)
    return sample_stationary_batch(net, params, replicas, seed, scan=scan, phase=phase,
                                   tag=tag, key=(phase,), threads=threads).samples


def tv_lower_bound_ball(net: Network, params: ModelParams, x0, k: int,
                        R_grid: Optional[Sequence[float]] = None, replicas: int = 10_000,
                        seed: int = 0, *, scan: Optional[ScanPolicy] = None,
                        confidence: float = DEFAULT_CONFIDENCE, threads: int = 1,
                        stationary: Optional[np.ndarray] = None) -> BallLowerBound:
    """max over R of |P(X_bar in B_R) - P(X_k in B_R)|.

    The half-width is a Bonferroni-corrected normal interval over the R grid.
    ``stationary`` may carry precomputed draws at the phase of step k.
    """
    d = check_model(net, params)
    seed = check_seed(seed)
    scan = scan or ScanPolicy.random()
    if replicas < MIN_REPLICAS:
        raise PreconditionError(f"lower bound needs >= {MIN_REPLICAS} replicas")
    if R_grid is not None and len(R_grid) == 0:
        raise PreconditionError("empty R grid")
    x0 = as_array(x0)
    if stationary is None:
        stationary = stationary_reference(net, params, scan, k, replicas, seed,
                                          StreamTag.BALL_STATIONARY, threads)
    forward = simulate_forward_batch(net, params, x0, k, scan, seed, replicas,
                                     tag=StreamTag.BALL_FORWARD, key=(k,), threads=threads)
    radii = default_radius_grid(stationary) if R_grid is None else np.asarray(R_grid, float)
    stat_norm = np.linalg.norm(stationary, axis=1)
    fwd_norm = np.linalg.norm(forward, axis=1)
    p_stat = (stat_norm[None, :] <= radii[:, None]).mean(axis=1)
    p_fwd = (fwd_norm[None, :] <= radii[:, None]).mean(axis=1)
    diff = np.abs(p_stat - p_fwd)
    z = _two_sided_z(confidence, radii.size)
    ci = z * np.sqrt(p_stat * (1 - p_stat) / stat_norm.size + p_fwd * (1 - p_fwd) / fwd_norm.size)
    best = int(np.argmax(diff))
    per_radius = [
        {"radius": float(r), "p_stationary": float(a), "p_forward": float(b),
         "diff": float(c), "ci": float(e)}
        for r, a, b, c, e in zip(radii, p_stat, p_fwd, diff, ci)
    ]
    return BallLowerBound(k=k, lower=float(diff[best]), lower_ci=float(ci[best]),
                          radius=float(radii[best]), per_radius=per_radius)


def _coupling_chunk(net: Network, params: ModelParams, x0: np.ndarray, k: int,
                    scan: ScanPolicy, seed: int, start: np.ndarray,
                    lo: int, hi: int) -> Tuple[np.ndarray, np.ndarray]:
    d = net.d
    n = hi - lo
    rows = np.arange(n)
    if scan.is_random:
        idx = np.empty((n, k), dtype=np.int64)
        for r in range(n):
            idx[r] = replica_rng(seed, StreamTag.COUPLING_INDICES, lo + r).integers(0, d, size=k)
    else:
        idx = np.broadcast_to(scan.indices(d, k), (n, k))
    steps = np.arange(1, k + 1)
    last = np.zeros((n, d), dtype=np.int64)
    for i in range(d):
        last[:, i] = np.where(idx == i, steps, 0).max(axis=1)
    collected = (last > 0).all(axis=1)

    weights = params.e[:, None] * net.p
    s = x0[None, :] - start[lo:hi]
    g = np.broadcast_to(np.eye(d), (n, d, d)).copy()
    for t in range(k):
        i = idx[:, t]
        s[rows, i] = np.einsum('rj,rj->r', weights[i], s)
        g[rows, i, :] = np.einsum('rj,rjc->rc', weights[i], g)
        final = last[rows, i] == t + 1
        if final.any():
            r = rows[final]
            c = i[final]
            g[r, :, c] = 0.0
            g[r, c, c] = params.sigma[c]

    contrib = np.ones(n)
    ok = np.flatnonzero(collected)
    if ok.size:
        order = np.argsort(last[ok], axis=1)
        gp = g[ok[:, None, None], order[:, :, None], order[:, None, :]]
        sp = np.take_along_axis(s[ok], order, axis=1)
        diag = gp[:, np.arange(d), np.arange(d)]
        assert np.allclose(diag, params.sigma[order]), "coupling matrix lost its diagonal"
        w = np.zeros_like(sp)
        for a in range(d):
            w[:, a] = (sp[:, a] - np.einsum('rb,rb->r', gp[:, a, :a], w[:, :a])) / diag[:, a]
        # translation TV is invariant under permuting coordinates
        contrib[ok] = params.noise.translation_tv(w)
    return contrib, ~collected


def tv_upper_bound_coupling(net: Network, params: ModelParams, x0, k: int,
                            replicas: int = 10_000, seed: int = 0, *,
                            scan: Optional[ScanPolicy] = None,
                            confidence: float = DEFAULT_CONFIDENCE, threads: int = 1,
                            chunk: int = DEFAULT_CHUNK,
                            stationary: Optional[np.ndarray] = None) -> CouplingUpperBound:
    """Mean coupling failure probability; replicas with T > k contribute 1."""
    d = check_model(net, params)
    seed = check_seed(seed)
    scan = scan or ScanPolicy.random()
    scan.validate(d)
    if replicas < MIN_REPLICAS:
        raise PreconditionError(f"upper bound needs >= {MIN_REPLICAS} replicas")
    if k < d:
        return CouplingUpperBound(k=k, upper=1.0, upper_ci=0.0, p_uncollected=1.0)
    x0 = as_array(x0)
    if stationary is None:
        stationary = sample_stationary_batch(net, params, replicas, seed, scan=scan, phase=0,
                                             tag=StreamTag.COUPLING_STATIONARY,
                                             threads=threads).samples

    def run(lo: int, hi: int):
        return _coupling_chunk(net, params, x0, k, scan, seed, stationary, lo, hi)

    contrib, uncollected = concat_chunks(map_chunks(run, replicas, threads, chunk))
    upper = float(contrib.mean())
    ci = _two_sided_z(confidence) * float(contrib.std(ddof=1)) / math.sqrt(replicas)
    return CouplingUpperBound(k=k, upper=upper, upper_ci=ci,
                              p_uncollected=float(uncollected.mean()))


def tv_bracket(net: Network, params: ModelParams, x0, k: int, replicas: int = 10_000,
               seed: int = 0, *, scan: Optional[ScanPolicy] = None,
               R_grid: Optional[Sequence[float]] = None,
               confidence: float = DEFAULT_CONFIDENCE, threads: int = 1,
               ball_stationary: Optional[np.ndarray] = None,
               coupling_stationary: Optional[np.ndarray] = None) -> TVBracket:
    """Lower and upper estimates of d_tv(pi_k, pi), clamped to [0, 1]."""
    lower = tv_lower_bound_ball(net, params, x0, k, R_grid, replicas, seed, scan=scan,
                                confidence=confidence, threads=threads,
                                stationary=ball_stationary)
    upper = tv_upper_bound_coupling(net, params, x0, k, replicas, seed, scan=scan,
                                    confidence=confidence, threads=threads,
                                    stationary=coupling_stationary)
    lo = min(1.0, max(0.0, lower.lower))
    hi = min(1.0, max(0.0, upper.upper))
    clamped = lo != lower.lower or hi != upper.upper
    return TVBracket(k=k, lower=lo, lower_ci=lower.lower_ci, upper=hi, upper_ci=upper.upper_ci,
                     clamped=clamped)


def tv_bracket_series(net: Network, params: ModelParams, x0, ks: Sequence[int],
                      replicas: int = 10_000, seed: int = 0, *,
                      scan: Optional[ScanPolicy] = None, threads: int = 1,
                      confidence: float = DEFAULT_CONFIDENCE) -> List[TVBracket]:
    """Brackets for many k, reusing the stationary draws of each phase."""
    scan = scan or ScanPolicy.random()
    ball: Dict[int, np.ndarray] = {}
    coupling = sample_stationary_batch(net, params, replicas, seed, scan=scan, phase=0,
                                       tag=StreamTag.COUPLING_STATIONARY,
                                       threads=threads).samples
    out = []
    for k in ks:
        phase = _phase(scan, net.d, k)
        if phase not in ball:
            ball[phase] = stationary_reference(net, params, scan, k, replicas, seed,
                                               StreamTag.BALL_STATIONARY, threads)
        out.append(tv_bracket(net, params, x0, k, replicas, seed, scan=scan, threads=threads,
                              confidence=confidence, ball_stationary=ball[phase],
                              coupling_stationary=coupling))
    return out


def coupon_tail_exact(d: int, k: int) -> float:
    """P(T > k) for d equally likely coupons, by inclusion-exclusion."""
    if d < 1 or k < 0:
        raise PreconditionError("need d >= 1 and k >= 0")
    j = np.arange(1, d + 1)
    terms = (-1.0) ** (j + 1) * comb(d, j) * (1.0 - j / d) ** k
    return float(min(1.0, max(0.0, terms.sum())))


def coupon_tail_empirical(d: int, k: int, replicas: int, seed: int = 0, *,
                          threads: int = 1) -> Tuple[float, float]:
    """Simulated P(T > k) and its binomial standard error."""
    seed = check_seed(seed)

    def run(lo: int, hi: int):
        missing = np.empty(hi - lo, dtype=bool)
        for r in range(lo, hi):
            draws = replica_rng(seed, StreamTag.COUPON, r, (d, k)).integers(0, d, size=k)
            missing[r - lo] = np.unique(draws).size < d
        return missing

    missing = concat_chunks(map_chunks(run, replicas, threads))
    p = float(missing.mean())
    return p, math.sqrt(p * (1 - p) / replicas)


def exact_mode(net: Network, params: ModelParams, scan: ScanPolicy) -> bool:
    """Whether the exact Gaussian pipeline applies."""
    return net.d == 2 and params.noise.is_gaussian and scan.mode is ScanMode.CYCLE


def cutoff_profile(net: Network, params: ModelParams, x0_direction: SphereState,
                   ln_n_list: Sequence[float], beta_grid: Sequence[float], alpha: float,
                   replicas: int = 10_000, seed: int = 0, *,
                   scan: Optional[ScanPolicy] = None, alpha_source: str = "given",
                   level: float = 0.5, threads: int = 1) -> CutoffProfile:
    """d_tv at k = schedule_k(ln n, beta) over a grid of (ln n, beta).

    Exact values for the two-coordinate Gaussian cyclic model, brackets
    otherwise. In exact mode the crossings of ``level`` and their spacing
    between successive n are reported next to ln(n_{j+1}/n_j)/(-alpha).
    """
    d = check_model(net, params)
    scan = scan or ScanPolicy.random()
    exact = exact_mode(net, params, scan)
    rows: List[ProfileRow] = []
    crossings: List[Optional[float]] = []
    for ln_n in ln_n_list:
        schedules = [schedule_k(ln_n, beta, alpha) for beta in beta_grid]
        x0 = x0_direction.scaled(ln_n)
        if exact:
            k_hi = max([s.k for s in schedules] + [int(math.ceil(1.5 * ln_n / -alpha)) + 5])
            curve = tv_curve_exact(net, params, ln_n, x0_direction, k_hi)
            crossings.append(crossing_k(curve.ks, curve.tvs, level))
            for s in schedules:
                point = curve.points[s.k]
                rows.append(ProfileRow(ln_n, s.beta, s.k, tv_exact=point.tv, method="exact"))
        else:
            for s in schedules:
                b = tv_bracket(net, params, x0, s.k, replicas, seed, scan=scan,
                               threads=threads)
                rows.append(ProfileRow(ln_n, s.beta, s.k, tv_lower=b.lower, lower_ci=b.lower_ci,
                                       tv_upper=b.upper, upper_ci=b.upper_ci, method="bracket"))
    spacings: List[float] = []
    predicted: List[float] = []
    if exact:
        for j in range(1, len(crossings)):
            if crossings[j] is not None and crossings[j - 1] is not None:
                spacings.append(crossings[j] - crossings[j - 1])
                predicted.append((ln_n_list[j] - ln_n_list[j - 1]) / -alpha)
    logger.debug("cutoff profile", d=d, cells=len(rows), exact=exact, alpha=alpha)
    return CutoffProfile(rows=rows, alpha=alpha, alpha_source=alpha_source,
                         crossings=crossings, spacings=spacings, predicted_spacings=predicted)
