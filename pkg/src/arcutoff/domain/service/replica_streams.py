"""Deterministic per-replica random streams and chunked replica execution.

Replica ``r`` of an operation tagged ``tag`` always draws from the same
PCG64 stream, keyed by ``SeedSequence(seed, spawn_key=(tag, *key, r))``.
Work is split in fixed-size chunks; chunks may run on a thread pool but are
reassembled in replica order, so results never depend on the thread count.
"""

from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np

from ..errors import ConfigError

DEFAULT_CHUNK = 2048

T = TypeVar('T')


class StreamTag(IntEnum):
    """Stream namespaces; one per randomized operation."""
    FORWARD = 1
    STATIONARY = 2
    SPHERE = 3
    CONTRACTION = 4
    CONCENTRATION = 5
    COUPLING_INDICES = 6
    COUPLING_STATIONARY = 7
    BALL_FORWARD = 8
    BALL_STATIONARY = 9
    TV_MONTE_CARLO = 10
    SELF_TEST = 11
    SELF_TEST_REFERENCE = 12
    BACKWARD_PARTIAL = 13
    COUPON = 14


def check_seed(seed) -> int:
    if seed is None:
        raise ConfigError("seed required")
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def replica_rng(seed: int, tag: StreamTag, replica: int,
                key: Sequence[int] = ()) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(tag), *key, int(replica)))
    return np.random.Generator(np.random.PCG64(ss))


def stream_id(seed: int, tag: StreamTag, replica: int, key: Sequence[int] = ()) -> str:
    """Human readable identifier of a replica stream, echoed into run configs."""
    parts = [str(int(seed)), tag.name.lower(), *(str(k) for k in key), str(int(replica))]
    return "/".join(parts)


def chunk_bounds(n: int, chunk: int = DEFAULT_CHUNK) -> List[Tuple[int, int]]:
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def map_chunks(fn: Callable[[int, int], T], n: int, threads: int = 1,
               chunk: int = DEFAULT_CHUNK) -> List[T]:
    """Apply ``fn(start, stop)`` to every chunk of ``range(n)``, results in order."""
    bounds = chunk_bounds(n, chunk)
    if threads <= 1 or len(bounds) <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def concat_chunks(parts: List) -> object:
    """Concatenate chunk results along the replica axis (arrays or tuples of arrays)."""
    if not parts:
        raise ValueError("no replicas")
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(col, axis=0) for col in zip(*parts))
    return np.concatenate(parts, axis=0)
