"""
Stationary law via backward iteration.

    X_bar = b_{I_1}(Z_1) + A_{I_1} b_{I_2}(Z_2) + A_{I_1} A_{I_2} b_{I_3}(Z_3) + ...

The prefix operator A_{I_1}...A_{I_m} is kept as a d x d matrix and updated
by one rank-one correction per term. I_1 is the most recent update, so for a
cyclic scan the backward indices run through the cycle in reverse, ending at
the requested phase.

Stopping rule: term m counts as small when its envelope
max_i sigma_i ||prefix[:, i]|| (times the noise scale) is below ``tol``; the
series stops after ``patience`` consecutive small terms or at ``max_terms``.
The envelope is used instead of the realized increment because the realized
increment is exactly zero whenever a coordinate is re-selected immediately.
"""

import math
from typing import Optional, Sequence

import numpy as np

from ..errors import PreconditionError
from ..model.network import Network
from ..model.params import ModelParams
from ..model.reports import (
    MomentComparison,
    SelfTestReport,
    StationaryBatch,
    StationarySample,
)
from ..model.state import StateVec
from ..value_object.scan import ScanPolicy
from ..value_object.truncation import TruncationPolicy
from .model_core import check_model, simulate_forward_batch
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

DRAW_BLOCK = 64
MIN_SELF_TEST_SAMPLES = 10_000


def _backward_chunk(net: Network, params: ModelParams, policy: TruncationPolicy,
                    scan: ScanPolicy, phase: int, seed: int, tag: StreamTag, key: tuple,
                    lo: int, hi: int, noise_scale: float,
                    fixed_terms: Optional[int]):
    d = net.d
    n = hi - lo
    rngs = [replica_rng(seed, tag, r, key) for r in range(lo, hi)]
    weights = params.e[:, None] * net.p
    sigma = params.sigma * noise_scale
    pre = np.broadcast_to(np.eye(d), (n, d, d)).copy()
    total = np.zeros((n, d))
    run = np.zeros(n, dtype=np.int64)
    terms = np.zeros(n, dtype=np.int64)
    last = np.zeros(n)
    active = np.ones(n, dtype=bool)
    limit = policy.max_terms if fixed_terms is None else fixed_terms
    m = 0
    while m < limit and active.any():
        b = min(DRAW_BLOCK, limit - m)
        live = np.flatnonzero(active)
        nl = live.size
        lr = np.arange(nl)
        z = np.empty((nl, b))
        if scan.is_random:
            idx = np.empty((nl, b), dtype=np.int64)
            for j, r in enumerate(live):
                idx[j] = rngs[r].integers(0, d, size=b)
                z[j] = params.noise.sample(rngs[r], b)
        else:
            idx = np.broadcast_to(scan.backward_indices(d, b, phase - m), (nl, b))
            for j, r in enumerate(live):
                z[j] = params.noise.sample(rngs[r], b)
        p_live = pre[live]
        t_live = total[live]
        r_live = run[live]
        k_live = terms[live]
        l_live = last[live]
        a_live = np.ones(nl, dtype=bool)
        for t in range(b):
            i = idx[:, t]
            act = a_live
            envelope = (np.linalg.norm(p_live, axis=1) * sigma).max(axis=1)
            col = p_live[lr, :, i]
            t_live[act] += (col * (sigma[i] * z[:, t])[:, None])[act]
            k_live[act] += 1
            l_live[act] = envelope[act]
            r_live = np.where(act, np.where(envelope < policy.tol, r_live + 1, 0), r_live)
            delta = weights[i].copy()
            delta[lr, i] -= 1.0
            p_live += (col[:, :, None] * delta[:, None, :]) * act[:, None, None]
            if fixed_terms is None:
                a_live = act & (r_live < policy.patience)
                if not a_live.any():
                    break
        pre[live] = p_live
        total[live] = t_live
        run[live] = r_live
        terms[live] = k_live
        last[live] = l_live
        active[live] = a_live
        m += b
    capped = active if fixed_terms is None else np.zeros(n, dtype=bool)
    return total, terms, last, capped


def sample_stationary_batch(net: Network, params: ModelParams, replicas: int,
                            seed: int = 0, *, policy: Optional[TruncationPolicy] = None,
                            scan: Optional[ScanPolicy] = None, phase: int = 0,
                            noise_scale: float = 1.0,
                            tag: StreamTag = StreamTag.STATIONARY,
                            key: Sequence[int] = (), fixed_terms: Optional[int] = None,
                            threads: int = 1, chunk: int = DEFAULT_CHUNK) -> StationaryBatch:
    """``replicas`` independent draws of the backward iteration.

    ``phase`` (cyclic scans only) is the number of forward steps taken modulo
    the cycle length; phase 0 means the last update touched the last entry of
    the cycle. With ``fixed_terms`` exactly that many terms are summed and the
    stopping rule is ignored.
    """
    d = check_model(net, params)
    seed = check_seed(seed)
    scan = scan or ScanPolicy.random()
    scan.validate(d)
    scan.require_coverage(d)
    policy = policy or TruncationPolicy.default_for(d)
    key = tuple(int(v) for v in key)

    def run(lo: int, hi: int):
        return _backward_chunk(net, params, policy, scan, phase, seed, tag, key,
                               lo, hi, noise_scale, fixed_terms)

    total, terms, last, capped = concat_chunks(map_chunks(run, replicas, threads, chunk))
    batch = StationaryBatch(samples=total, terms=terms, last_increment=last, capped=capped)
    if batch.capped_count:
        logger.warning("backward iteration hit max_terms", capped=batch.capped_count,
                       max_terms=policy.max_terms, replicas=replicas)
    logger.debug("stationary batch", **batch.metadata())
    return batch


def sample_stationary(net: Network, params: ModelParams,
                      policy: Optional[TruncationPolicy] = None, seed: int = 0, *,
                      scan: Optional[ScanPolicy] = None, phase: int = 0,
                      noise_scale: float = 1.0) -> StationarySample:
    """One draw of X_bar with truncation metadata."""
    batch = sample_stationary_batch(net, params, 1, seed, policy=policy, scan=scan,
                                    phase=phase, noise_scale=noise_scale)
    return StationarySample(
        x=StateVec(batch.samples[0]),
        terms_used=int(batch.terms[0]),
        last_increment_norm=float(batch.last_increment[0]),
        truncated_at_cap=bool(batch.capped[0]),
    )


def backward_partial_sums(net: Network, params: ModelParams, m: int, replicas: int,
                          seed: int = 0, *, scan: Optional[ScanPolicy] = None,
                          phase: int = 0, threads: int = 1) -> np.ndarray:
    """The first m terms of the backward iteration, one row per replica."""
    if m < 0:
        raise PreconditionError("term count must be >= 0")
    batch = sample_stationary_batch(net, params, replicas, seed, scan=scan, phase=phase,
                                    tag=StreamTag.BACKWARD_PARTIAL, fixed_terms=m,
                                    threads=threads)
    return batch.samples


def _z(diff: np.ndarray, se: np.ndarray) -> np.ndarray:
    out = np.zeros_like(diff)
    np.divide(diff, se, out=out, where=se > 0)
    out[(se == 0) & (diff != 0)] = np.inf
    return out


def compare_moments(a: np.ndarray, b: np.ndarray, threshold: float) -> MomentComparison:
    """Two-sample z statistics for means and all second central moments."""
    na, nb = a.shape[0], b.shape[0]
    ma, mb = a.mean(axis=0), b.mean(axis=0)
    z_means = _z(ma - mb, np.sqrt(a.var(axis=0, ddof=1) / na + b.var(axis=0, ddof=1) / nb))
    ca, cb = a - ma, b - mb
    qa = ca[:, :, None] * ca[:, None, :]
    qb = cb[:, :, None] * cb[:, None, :]
    se = np.sqrt(qa.var(axis=0, ddof=1) / na + qb.var(axis=0, ddof=1) / nb)
    z_cov = _z(qa.mean(axis=0) - qb.mean(axis=0), se)
    return MomentComparison(z_means=z_means, z_cov=z_cov, threshold=threshold)


def stationarity_self_test(net: Network, params: ModelParams, n_samples: int = 100_000,
                           k_extra: int = 5, seed: int = 0, *,
                           scan: Optional[ScanPolicy] = None,
                           policy: Optional[TruncationPolicy] = None,
                           forward_damping_scale: float = 1.0, threshold: float = 4.0,
                           threads: int = 1) -> SelfTestReport:
    """Draw from X_bar, push every draw k_extra forward steps, compare moments.

    For a cyclic scan whose phase changes, the pushed draws are compared with
    fresh draws at the new phase. ``forward_damping_scale`` != 1 perturbs the
    forward kernel and should make the test fail.
    """
    d = check_model(net, params)
    scan = scan or ScanPolicy.random()
    if n_samples < MIN_SELF_TEST_SAMPLES:
        raise PreconditionError(f"self test needs >= {MIN_SELF_TEST_SAMPLES} samples")
    before = sample_stationary_batch(net, params, n_samples, seed, policy=policy, scan=scan,
                                     tag=StreamTag.SELF_TEST, key=(0,), threads=threads)
    after = simulate_forward_batch(net, params, before.samples, k_extra, scan, seed, n_samples,
                                   tag=StreamTag.SELF_TEST, key=(1,),
                                   damping_scale=forward_damping_scale, threads=threads)
    new_phase = 0 if scan.is_random else k_extra % len(scan.period(d))
    if new_phase == 0:
        reference = before.samples
    else:
        reference = sample_stationary_batch(net, params, n_samples, seed, policy=policy,
                                            scan=scan, phase=new_phase,
                                            tag=StreamTag.SELF_TEST_REFERENCE,
                                            threads=threads).samples
    comparison = compare_moments(reference, after, threshold)
    logger.debug("stationarity self test", max_abs_z=comparison.max_abs_z,
                 n_samples=n_samples, k_extra=k_extra)
    return SelfTestReport(n_samples=n_samples, k_extra=k_extra, comparison=comparison,
                          capped=before.capped_count)


def compare_forward_backward(net: Network, params: ModelParams, k: int = 50,
                             replicas: int = 20_000, seed: int = 0, *,
                             scan: Optional[ScanPolicy] = None, threshold: float = 3.0,
                             threads: int = 1) -> MomentComparison:
    """X_k - A_{I_k}...A_{I_1} X_0 against the k-term backward iteration.

    The left side does not depend on X_0, so the chain is run from the origin.
    """
    d = check_model(net, params)
    scan = scan or ScanPolicy.random()
    forward = simulate_forward_batch(net, params, np.zeros(d), k, scan, seed, replicas,
                                     tag=StreamTag.FORWARD, key=(k,), threads=threads)
    phase = 0 if scan.is_random else k % len(scan.period(d))
    backward = backward_partial_sums(net, params, k, replicas, seed, scan=scan, phase=phase,
                                     threads=threads)
    return compare_moments(forward, backward, threshold)


def truncation_gap(net: Network, params: ModelParams, replicas: int, seed: int,
                   policy: TruncationPolicy, *, scan: Optional[ScanPolicy] = None,
                   threads: int = 1) -> float:
    """Largest coordinate change when tol is divided by 10 (same streams)."""
    fine = TruncationPolicy(tol=policy.tol / 10.0, patience=policy.patience,
                            max_terms=policy.max_terms)
    a = sample_stationary_batch(net, params, replicas, seed, policy=policy, scan=scan,
                                threads=threads).samples
    b = sample_stationary_batch(net, params, replicas, seed, policy=fine, scan=scan,
                                threads=threads).samples
    return float(np.abs(a - b).max()) if replicas else math.nan
