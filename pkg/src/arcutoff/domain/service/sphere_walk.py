"""
Projected walk on the positive part of the unit sphere.

Averaging the chain over its noise and normalizing gives

    Y_0 = X_0 / ||X_0||,    Y_k = A_{I_k} Y_{k-1} / ||A_{I_k} Y_{k-1}||

(Euclidean norm throughout). This module holds the walk, the Hilbert metric
on positive directions, the coordinate-ratio invariant, the common-index
contraction probe, the estimator of

    alpha = E[ ln ||A_I Y|| ],  Y ~ stationary law of the walk,

and the concentration probe for ln ||A_{I_k} ... A_{I_1} y0||.
"""

import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConvergenceError, PreconditionError
from ..model.network import Network
from ..model.params import ModelParams
from ..model.reports import (
    AlphaEstimate,
    ConcentrationReport,
    ContractionReport,
    ExhaustiveRatioReport,
    RatioBoundReport,
    TailRow,
)
from ..model.state import SphereState, as_array
from ..value_object.scan import ScanMode, ScanPolicy
from .model_core import _check_index, check_model
from .replica_streams import (
    DEFAULT_CHUNK,
    StreamTag,
    check_seed,
    concat_chunks,
    map_chunks,
    replica_rng,
)
from ...infrastructure.logging import get_logger

logger = get_logger(__name__)

HOLD_TOL = 1e-12
STEP_TOL = 1e-12
DEFAULT_BATCHES = 30
MIN_PROBE_REPLICAS = 100
DEFAULT_T_GRID = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


def _positive(y) -> np.ndarray:
    v = as_array(y)
    if not np.all(v > 0):
        raise PreconditionError(f"expected strictly positive coordinates, got {v.tolist()}")
    return v


def project(x) -> SphereState:
    """x / ||x|| for a strictly positive x."""
    return SphereState.from_positive(as_array(x))


def sphere_step(net: Network, params: ModelParams, y,
                i: int) -> Tuple[SphereState, float]:
    """One step of the walk; returns the new direction and ln ||A_i y||."""
    d = check_model(net, params)
    i = _check_index(i, d)
    v = _positive(y).copy()
    scale = np.linalg.norm(v)
    v[i] = params.e[i] * (net.p[i] @ v)
    norm = np.linalg.norm(v)
    return SphereState(v / norm), float(math.log(norm / scale))


def epsilon_const(net: Network, params: ModelParams) -> float:
    """min over edges i ~ j of e_i * p_ij."""
    check_model(net, params)
    w = params.e[:, None] * net.p
    return float(w[net.edges].min())


def ratio_bound_check(net: Network, params: ModelParams, y0,
                      indices: Sequence[int]) -> RatioBoundReport:
    """Compare min/max of the walk after ``indices`` with (min y0/max y0) * eps^(d-1)."""
    d = check_model(net, params)
    v = _positive(y0).copy()
    rhs = float(v.min() / v.max()) * epsilon_const(net, params) ** (d - 1)
    w = params.e[:, None] * net.p
    for i in indices:
        i = _check_index(i, d)
        v[i] = w[i] @ v
        v /= v.max()
    lhs = float(v.min() / v.max())
    return RatioBoundReport(lhs=lhs, rhs=rhs, holds=lhs >= rhs - HOLD_TOL)


def exhaustive_ratio_check(net: Network, params: ModelParams, y0,
                           max_len: int = 8) -> ExhaustiveRatioReport:
    """Ratio bound over every index sequence of length 0..max_len.

    Sequences are enumerated level by level so prefixes are shared; the state
    count at level L is d**L.
    """
    d = check_model(net, params)
    v0 = _positive(y0)
    rhs = float(v0.min() / v0.max()) * epsilon_const(net, params) ** (d - 1)
    w = params.e[:, None] * net.p
    states = (v0 / v0.max())[None, :]
    worst = float(v0.min() / v0.max())
    worst_seq: Tuple[int, ...] = ()
    checked = 1
    for level in range(1, max_len + 1):
        children = np.repeat(states[:, None, :], d, axis=1)
        for i in range(d):
            children[:, i, i] = states @ w[i]
        states = children.reshape(-1, d)
        states = states / states.max(axis=1, keepdims=True)
        ratios = states.min(axis=1)
        checked += ratios.size
        j = int(np.argmin(ratios))
        if ratios[j] < worst:
            worst = float(ratios[j])
            worst_seq = tuple(int(c) for c in np.unravel_index(j, (d,) * level))
    logger.debug("exhaustive ratio check", d=d, max_len=max_len, sequences=checked)
    return ExhaustiveRatioReport(
        worst_ratio=worst,
        rhs=rhs,
        holds=worst >= rhs - HOLD_TOL,
        sequences_checked=checked,
        max_len=max_len,
        worst_sequence=worst_seq,
    )


def hilbert_distance(y, y_prime) -> float:
    """ln( max_i(y_i/y'_i) / min_i(y_i/y'_i) ); invariant under scaling either argument."""
    r = _positive(y) / _positive(y_prime)
    return float(math.log(r.max() / r.min()))


def _hilbert_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    r = a / b
    return np.log(r.max(axis=1) / r.min(axis=1))


def greedy_contraction_sequence(net: Network, params: ModelParams, y0,
                                y0_prime) -> Tuple[Tuple[int, ...], float]:
    """d updates that strictly shrink the Hilbert distance of the coupled pair.

    At every step the argmax set of y/y' loses one element: pick the lowest
    index of the argmax set that has a neighbour outside it (lowest index of
    the set once the ratios are all equal).
    """
    d = check_model(net, params)
    a = _positive(y0).copy()
    b = _positive(y0_prime).copy()
    w = params.e[:, None] * net.p
    seq = []
    for _ in range(d):
        r = a / b
        top = r >= r.max() * (1.0 - 1e-12)
        outside = ~top
        choice = None
        if outside.any():
            for i in np.flatnonzero(top):
                if np.any(net.edges[i] & outside):
                    choice = int(i)
                    break
        if choice is None:
            choice = int(np.flatnonzero(top)[0])
        a[choice] = w[choice] @ a
        b[choice] = w[choice] @ b
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        seq.append(choice)
    return tuple(seq), hilbert_distance(a, b)


def coupled_contraction_probe(net: Network, params: ModelParams, y0, y0_prime,
                              trials: int = 10_000, seed: int = 0, *,
                              length: Optional[int] = None, threads: int = 1,
                              chunk: int = DEFAULT_CHUNK) -> ContractionReport:
    """Run both walks with common uniform indices and track h(Y_k, Y'_k)."""
    d = check_model(net, params)
    seed = check_seed(seed)
    a0 = _positive(y0)
    b0 = _positive(y0_prime)
    h0 = hilbert_distance(a0, b0)
    if h0 <= 0.0:
        raise PreconditionError("coupled contraction probe needs two distinct directions")
    length = 10 * d if length is None else int(length)
    if length < d:
        raise PreconditionError(f"trajectory length {length} shorter than d={d}")
    w = params.e[:, None] * net.p

    def run(lo: int, hi: int):
        n = hi - lo
        idx = np.stack([replica_rng(seed, StreamTag.CONTRACTION, r).integers(0, d, size=length)
                        for r in range(lo, hi)])
        a = np.broadcast_to(a0 / np.linalg.norm(a0), (n, d)).copy()
        b = np.broadcast_to(b0 / np.linalg.norm(b0), (n, d)).copy()
        rows = np.arange(n)
        h_prev = np.full(n, h0)
        max_h = np.full(n, h0)
        max_inc = np.full(n, -np.inf)
        strict = np.zeros(n, dtype=bool)
        for t in range(length):
            i = idx[:, t]
            a[rows, i] = np.einsum('rj,rj->r', w[i], a)
            b[rows, i] = np.einsum('rj,rj->r', w[i], b)
            a /= np.linalg.norm(a, axis=1, keepdims=True)
            b /= np.linalg.norm(b, axis=1, keepdims=True)
            h = _hilbert_rows(a, b)
            max_inc = np.maximum(max_inc, h - h_prev)
            max_h = np.maximum(max_h, h)
            h_prev = h
            if t == d - 1:
                strict = h < h0 - STEP_TOL
        return max_h, max_inc, strict

    max_h, max_inc, strict = concat_chunks(map_chunks(run, trials, threads, chunk))
    seq, h_after = greedy_contraction_sequence(net, params, a0, b0)
    report = ContractionReport(
        trials=trials,
        length=length,
        h0=h0,
        max_ratio=float(max_h.max() / h0),
        max_step_increase=float(max(max_inc.max(), 0.0)),
        strict_decrease_fraction=float(strict.mean()),
        bound=float(d ** -d),
        greedy_sequence=seq,
        greedy_h_after=h_after,
    )
    logger.debug("contraction probe", trials=trials, length=length,
                 strict_fraction=report.strict_decrease_fraction)
    return report


def exact_alpha_d2(params: ModelParams, scan: ScanPolicy) -> float:
    """Closed-form alpha for d=2.

    The walk settles on the two directions (e_1, 1) and (1, e_2); one
    alternation multiplies the norm by e_1 e_2 overall. Deterministic cycle:
    (1/2) ln(e_1 e_2). Random scan: re-selecting the last coordinate has
    log-factor 0, so (1/4) ln(e_1 e_2).
    """
    if params.d != 2:
        raise PreconditionError("closed-form alpha is only available for d=2")
    log_prod = float(np.log(params.e).sum())
    if scan.mode is ScanMode.RANDOM:
        return 0.25 * log_prod
    if scan.mode is ScanMode.CYCLE:
        return 0.5 * log_prod
    raise PreconditionError("closed-form alpha needs random or cyclic scan")


def alpha_references(params: ModelParams) -> Dict[str, float]:
    if params.d != 2:
        return {}
    return {
        "deterministic_cycle": exact_alpha_d2(params, ScanPolicy.cycle()),
        "random_scan": exact_alpha_d2(params, ScanPolicy.random()),
    }


def _walk_log_factors(weights: np.ndarray, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
    out = np.empty(idx.size)
    for t, i in enumerate(idx):
        y[i] = weights[i] @ y
        norm = math.sqrt(y @ y)
        y /= norm
        out[t] = math.log(norm)
    return out


def estimate_alpha(net: Network, params: ModelParams, scan: Optional[ScanPolicy] = None,
                   burn_in: int = 1_000, n_steps: int = 1_000_000, seed: int = 0, *,
                   batches: int = DEFAULT_BATCHES) -> AlphaEstimate:
    """Single long trajectory from the uniform direction.

    Runs ``burn_in + n_steps`` steps, averages the log-factors of the last
    ``n_steps`` and attaches a batch-means standard error.
    """
    d = check_model(net, params)
    seed = check_seed(seed)
    scan = scan or ScanPolicy.random()
    scan.validate(d)
    if burn_in < 0:
        raise PreconditionError("burn_in must be >= 0")
    if n_steps < 2 * batches:
        raise PreconditionError(f"n_steps={n_steps} too small for {batches} batches")
    if n_steps < 10 * burn_in:
        logger.warning("short alpha run", n_steps=n_steps, burn_in=burn_in)
    rng = replica_rng(seed, StreamTag.SPHERE, 0)
    idx = scan.indices(d, burn_in + n_steps, rng)
    weights = params.e[:, None] * net.p
    y = np.full(d, 1.0 / math.sqrt(d))
    factors = _walk_log_factors(weights, y, idx)[burn_in:]
    size = n_steps // batches
    batch_means = factors[:size * batches].reshape(batches, size).mean(axis=1)
    alpha_hat = float(factors.mean())
    std_error = float(batch_means.std(ddof=1) / math.sqrt(batches))
    flagged = False
    if alpha_hat >= 0.0:
        if alpha_hat > 3.0 * std_error:
            raise ConvergenceError(
                f"alpha estimate {alpha_hat:.6g} is positive beyond 3 standard errors "
                f"({std_error:.3g}); the model or the walk is broken"
            )
        flagged = True
        logger.warning("nonnegative alpha estimate", alpha_hat=alpha_hat, std_error=std_error)
    estimate = AlphaEstimate(
        alpha_hat=alpha_hat,
        std_error=std_error,
        n_steps=n_steps,
        burn_in=burn_in,
        scan=scan.mode.value,
        batches=batches,
        flagged=flagged,
        references=alpha_references(params),
    )
    logger.debug("alpha estimated", alpha_hat=alpha_hat, std_error=std_error, scan=scan.mode.value)
    return estimate


def concentration_probe(net: Network, params: ModelParams, y0, k_list: Sequence[int],
                        replicas: int = 10_000, seed: int = 0, *,
                        scan: Optional[ScanPolicy] = None,
                        t_grid: Sequence[float] = DEFAULT_T_GRID,
                        threads: int = 1, chunk: int = DEFAULT_CHUNK) -> ConcentrationReport:
    """Sample L_k = ln ||A_{I_k}...A_{I_1} y0|| and fit its growth and tails.

    * slope: least-squares exponent of std(L_k) against k (log-log)
    * alpha_hat, drift: least-squares slope of mean(L_k) against k and the
      recentered means mean(L_k) - k * alpha_hat
    * tails at the largest k: P(|L_k - mean| >= t sqrt(k)) against
      2 exp(-gamma_hat t^2); gamma_hat is the least-squares fit of
      ln(exceedance/2) = -gamma t^2, lowered where needed so the envelope
      dominates every tabulated point
    """
    d = check_model(net, params)
    seed = check_seed(seed)
    scan = scan or ScanPolicy.random()
    scan.validate(d)
    if replicas < MIN_PROBE_REPLICAS:
        raise PreconditionError(f"concentration probe needs >= {MIN_PROBE_REPLICAS} replicas")
    ks = [int(k) for k in k_list]
    if not ks or ks[0] < 1 or any(b <= a for a, b in zip(ks, ks[1:])):
        raise PreconditionError(f"k_list must be positive and strictly increasing, got {ks}")
    k_max = ks[-1]
    y_start = _positive(y0) / np.linalg.norm(_positive(y0))
    weights = params.e[:, None] * net.p
    record_at = {k: j for j, k in enumerate(ks)}

    def run(lo: int, hi: int):
        n = hi - lo
        idx = np.stack([scan.indices(d, k_max, replica_rng(seed, StreamTag.CONCENTRATION, r))
                        for r in range(lo, hi)])
        y = np.broadcast_to(y_start, (n, d)).copy()
        rows = np.arange(n)
        log_norm = np.zeros(n)
        out = np.empty((n, len(ks)))
        for t in range(k_max):
            i = idx[:, t]
            y[rows, i] = np.einsum('rj,rj->r', weights[i], y)
            norm = np.linalg.norm(y, axis=1)
            y /= norm[:, None]
            log_norm += np.log(norm)
            j = record_at.get(t + 1)
            if j is not None:
                out[:, j] = log_norm
        return out

    samples = concat_chunks(map_chunks(run, replicas, threads, chunk))
    mean = samples.mean(axis=0)
    std = samples.std(axis=0, ddof=1)
    std[np.ptp(samples, axis=0) == 0] = 0.0
    k_arr = np.asarray(ks, dtype=np.float64)
    if len(ks) >= 2:
        alpha_hat = float(np.polyfit(k_arr, mean, 1)[0])
    else:
        alpha_hat = float(mean[0] / k_arr[0])
    if len(ks) >= 2 and np.all(std > 0):
        slope = float(np.polyfit(np.log(k_arr), np.log(std), 1)[0])
    else:
        slope = 0.0
    drift = mean - k_arr * alpha_hat

    dev = np.abs(samples[:, -1] - mean[-1]) / math.sqrt(k_max)
    t_arr = np.asarray(t_grid, dtype=np.float64)
    exceed = np.array([(dev >= t).mean() for t in t_arr])
    positive = exceed > 0
    if positive.any():
        tp = t_arr[positive]
        logs = np.log(exceed[positive] / 2.0)
        gamma_ls = float(-(tp ** 2 @ logs) / (tp ** 4).sum())
        gamma_dom = float(np.min(-logs / tp ** 2))
        gamma_hat = min(gamma_ls, gamma_dom)
    else:
        gamma_ls = gamma_hat = math.inf
    tails = [
        TailRow(t=float(t), empirical=float(p), bound=float(2.0 * math.exp(-gamma_hat * t * t)))
        for t, p in zip(t_arr, exceed)
    ]
    return ConcentrationReport(
        k=ks,
        replicas=replicas,
        mean=mean.tolist(),
        std=std.tolist(),
        slope=slope,
        alpha_hat=alpha_hat,
        drift=drift.tolist(),
        gamma_hat=gamma_hat,
        gamma_ls=gamma_ls,
        tails=tails,
    )
