"""
Auto-regressive coordinate-update chain.

One step picks a coordinate i and replaces it by a damped weighted average of
the other coordinates plus scaled noise:

    x_hat = P x
    (A_i x)_i = e_i * x_hat_i,   (A_i x)_j = x_j  for j != i
    X_k = A_{I_k} X_{k-1} + sigma_{I_k} Z_k e_{I_k}

Coordinates are 0-based here; files and the CLI use 1-based indices.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import (
    DimensionError,
    IndexOutOfRangeError,
    ModelValidationError,
    PreconditionError,
)
from ..model.network import Network
from ..model.params import ModelParams
from ..model.reports import Trajectory
from ..model.state import StateVec, as_array
from ..value_object.scan import ScanPolicy
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

MEAN_TOL = 1e-12


def check_model(net: Network, params: ModelParams) -> int:
    if net.d != params.d:
        raise DimensionError(f"network has d={net.d} but parameters have d={params.d}")
    return net.d


def _check_index(i: int, d: int) -> int:
    i = int(i)
    if not 0 <= i < d:
        raise IndexOutOfRangeError(f"coordinate index {i} outside 0..{d - 1}")
    return i


def _vector(x, d: int) -> np.ndarray:
    v = as_array(x)
    if v.shape != (d,):
        raise DimensionError(f"expected a vector of length {d}, got shape {v.shape}")
    return v


def weighted_average(net: Network, x) -> StateVec:
    """x_hat_i = sum_j p_ij x_j."""
    return StateVec(net.p @ _vector(x, net.d))


def update_matrix(net: Network, params: ModelParams, i: int) -> np.ndarray:
    """A_i as a d x d matrix: identity with row i replaced by e_i * P[i]."""
    d = check_model(net, params)
    i = _check_index(i, d)
    a = np.eye(d)
    a[i] = params.e[i] * net.p[i]
    return a


def apply_a(net: Network, params: ModelParams, i: int, x) -> StateVec:
    d = check_model(net, params)
    i = _check_index(i, d)
    v = _vector(x, d).copy()
    v[i] = params.e[i] * (net.p[i] @ v)
    return StateVec(v)


apply_A = apply_a


def chain_step(net: Network, params: ModelParams, x, i: int, z: float) -> StateVec:
    """A_i x + sigma_i z e_i."""
    d = check_model(net, params)
    i = _check_index(i, d)
    v = _vector(x, d).copy()
    v[i] = params.e[i] * (net.p[i] @ v) + params.sigma[i] * float(z)
    return StateVec(v)


def mean_after_updates(net: Network, params: ModelParams, x0,
                       indices: Sequence[int]) -> StateVec:
    """A_{I_k} ... A_{I_1} x0, the noise-averaged state for a fixed index sequence.

    Only equals E_Z[X_k] for mean-zero noise, so biased noise is rejected.
    """
    if abs(params.noise.mean) > MEAN_TOL:
        raise PreconditionError(
            f"mean_after_updates needs mean-zero noise, got mean {params.noise.mean:g}"
        )
    d = check_model(net, params)
    v = _vector(x0, d).copy()
    w = params.e[:, None] * net.p
    for i in indices:
        i = _check_index(i, d)
        v[i] = w[i] @ v
    return StateVec(v)


def step_batch(x: np.ndarray, idx: np.ndarray, inc: np.ndarray,
               weights: np.ndarray) -> None:
    """In-place step of many replicas: x[r, idx[r]] = weights[idx[r]] . x[r] + inc[r]."""
    rows = np.arange(x.shape[0])
    x[rows, idx] = np.einsum('rj,rj->r', weights[idx], x) + inc


def _forward_chunk(net: Network, params: ModelParams, x0: np.ndarray, k: int,
                   scan: ScanPolicy, seed: int, tag: StreamTag, key: Tuple[int, ...],
                   start: int, stop: int, noise_scale: float, start_phase: int,
                   weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    d = net.d
    n = stop - start
    idx = np.empty((n, k), dtype=np.int64)
    z = np.empty((n, k))
    for r in range(n):
        rng = replica_rng(seed, tag, start + r, key)
        idx[r] = scan.indices(d, k, rng, start=start_phase)
        z[r] = params.noise.sample(rng, k)
    x = np.array(x0[start:stop] if x0.ndim == 2 else np.broadcast_to(x0, (n, d)),
                 dtype=np.float64)
    scaled = params.sigma[idx] * z * noise_scale
    for t in range(k):
        step_batch(x, idx[:, t], scaled[:, t], weights)
    return x, idx


def simulate_forward_batch(net: Network, params: ModelParams, x0, k: int,
                           scan: ScanPolicy, seed: int, replicas: int, *,
                           tag: StreamTag = StreamTag.FORWARD,
                           key: Sequence[int] = (), noise_scale: float = 1.0,
                           start_phase: int = 0, damping_scale: float = 1.0,
                           threads: int = 1, chunk: int = DEFAULT_CHUNK,
                           return_indices: bool = False):
    """Run ``replicas`` independent copies of the chain for k steps.

    ``x0`` is either one starting vector or one row per replica.
    ``damping_scale`` multiplies every e_i; it exists for negative controls.
    """
    d = check_model(net, params)
    seed = check_seed(seed)
    if k < 0:
        raise PreconditionError("step count must be >= 0")
    scan.validate(d)
    x0 = np.asarray(as_array(x0) if not isinstance(x0, np.ndarray) else x0, dtype=np.float64)
    if x0.ndim == 2 and x0.shape != (replicas, d):
        raise DimensionError(f"x0 rows {x0.shape} do not match ({replicas}, {d})")
    if x0.ndim == 1 and x0.shape != (d,):
        raise DimensionError(f"x0 has shape {x0.shape}, expected ({d},)")
    weights = (damping_scale * params.e)[:, None] * net.p
    key = tuple(int(v) for v in key)

    def run(lo: int, hi: int):
        return _forward_chunk(net, params, x0, k, scan, seed, tag, key, lo, hi,
                              noise_scale, start_phase, weights)

    x, idx = concat_chunks(map_chunks(run, replicas, threads, chunk))
    logger.debug("forward batch done", replicas=replicas, steps=k, scan=scan.mode.value)
    return (x, idx) if return_indices else x


def simulate_forward(net: Network, params: ModelParams, x0, k: int,
                     scan: Optional[ScanPolicy] = None, seed: int = 0, *,
                     trajectory: bool = False, noise_scale: float = 1.0,
                     key: Sequence[int] = ()) -> Union[StateVec, Trajectory]:
    """k chain steps from x0; a pure function of (model, x0, k, scan, seed).

    With ``trajectory=True`` the full path, the index sequence and the raw
    noise draws are returned.
    """
    d = check_model(net, params)
    scan = scan or ScanPolicy.random()
    scan.validate(d)
    if k < 0:
        raise PreconditionError("step count must be >= 0")
    rng = replica_rng(seed, StreamTag.FORWARD, 0, key)
    idx = scan.indices(d, k, rng)
    z = params.noise.sample(rng, k)
    x = _vector(x0, d).copy()
    weights = params.e[:, None] * net.p
    path = np.empty((k + 1, d)) if trajectory else None
    if trajectory:
        path[0] = x
    for t in range(k):
        i = idx[t]
        x[i] = weights[i] @ x + params.sigma[i] * z[t] * noise_scale
        if trajectory:
            path[t + 1] = x
    if trajectory:
        return Trajectory(states=path, indices=np.asarray(idx), noise=np.asarray(z))
    return StateVec(x)


def quadform_to_model(c, g) -> Tuple[Network, ModelParams]:
    """Chain parameters of the Gibbs sampler for the quadratic form

        Q(x) = sum_{i<j} c_ij (x_i - x_j)^2 + sum_i g_i (x_i - x*_i)^2

    p_ij = c_ij / sum_j c_ij,  e_i = s_i / (s_i + g_i),  sigma_i^2 = 1 / (s_i + g_i)
    with s_i = sum_{j != i} c_ij. The noise law is standard Gaussian.
    """
    c = np.asarray(c, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != g.size:
        raise DimensionError(f"c has shape {c.shape} but g has {g.size} entries")
    if not np.allclose(c, c.T, rtol=0, atol=1e-12):
        raise ModelValidationError("c must be symmetric")
    if np.any(np.diag(c) != 0):
        raise ModelValidationError("c must have a zero diagonal")
    if np.any(c < 0):
        raise ModelValidationError("c must be nonnegative")
    if np.any(~(g > 0)):
        raise ModelValidationError(f"g must be positive, got {g.tolist()}")
    s = c.sum(axis=1)
    if np.any(s <= 0):
        raise ModelValidationError("c-graph is not connected: isolated node")
    net = Network(c / s[:, None])
    params = ModelParams(s / (s + g), np.sqrt(1.0 / (s + g)))
    return net, params
