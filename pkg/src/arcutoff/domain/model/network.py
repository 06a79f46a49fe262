"""Averaging network on d coordinates."""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import ModelValidationError

ROW_SUM_TOL = 1e-12


def _reachable(adj: np.ndarray, start: int = 0) -> np.ndarray:
    """Breadth-first search over a boolean adjacency matrix."""
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in np.flatnonzero(adj[node] & ~seen):
            seen[nxt] = True
            queue.append(int(nxt))
    return seen


def is_strongly_connected(adj: np.ndarray) -> bool:
    return bool(_reachable(adj).all() and _reachable(adj.T).all())


@dataclass(frozen=True, eq=False)
class Network:
    """Row-stochastic transition matrix P of a connected network without loops.

    Connectivity is checked on the directed support {(i, j): p_ij > 0}; both
    the forward and the reversed graph must reach every node.
    """
    p: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ModelValidationError(f"p must be a square matrix, got shape {p.shape}")
        d = p.shape[0]
        if d < 2:
            raise ModelValidationError("network dimension must be >= 2")
        if not np.all(np.isfinite(p)):
            raise ModelValidationError("p has non-finite entries")
        if np.any(p < 0):
            raise ModelValidationError("p has negative entries")
        if np.any(np.diag(p) != 0):
            raise ModelValidationError("p must have a zero diagonal (network without loops)")
        row_err = np.abs(p.sum(axis=1) - 1.0)
        if np.any(row_err > ROW_SUM_TOL):
            worst = int(np.argmax(row_err))
            raise ModelValidationError(
                f"row {worst + 1} of p sums to {p[worst].sum():.15g}, expected 1"
            )
        if not is_strongly_connected(p > 0):
            raise ModelValidationError("support graph of p is not connected")
        p.setflags(write=False)
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'd', d)

    @property
    def edges(self) -> np.ndarray:
        """Boolean adjacency i ~ j  <=>  p_ij > 0."""
        return self.p > 0

    @classmethod
    def swap(cls) -> 'Network':
        """The only d=2 network: each coordinate averages the other."""
        return cls(np.array([[0.0, 1.0], [1.0, 0.0]]))

    @classmethod
    def complete(cls, d: int) -> 'Network':
        p = np.full((d, d), 1.0 / (d - 1))
        np.fill_diagonal(p, 0.0)
        return cls(p)

    @classmethod
    def path(cls, d: int) -> 'Network':
        """Line path 1 - 2 - ... - d with uniform weights over neighbours."""
        c = np.zeros((d, d))
        for i in range(d - 1):
            c[i, i + 1] = c[i + 1, i] = 1.0
        return cls(c / c.sum(axis=1, keepdims=True))

    @classmethod
    def from_weights(cls, c) -> 'Network':
        c = np.asarray(c, dtype=np.float64)
        rows = c.sum(axis=1, keepdims=True)
        if np.any(rows <= 0):
            raise ModelValidationError("every node needs at least one positive weight")
        return cls(c / rows)

    def to_dict(self) -> dict:
        return {"d": self.d, "p": self.p.tolist()}


def random_network(d: int, rng: np.random.Generator,
                   extra_edge_prob: float = 0.3) -> Network:
    """Random connected symmetric-support network with positive random weights.

    A random spanning tree guarantees connectivity; further pairs are joined
    with probability ``extra_edge_prob``. Rows are normalized afterwards, so
    the transition matrix itself is generally asymmetric.
    """
    order = rng.permutation(d)
    c = np.zeros((d, d))
    for pos in range(1, d):
        parent = order[rng.integers(0, pos)]
        child = order[pos]
        c[parent, child] = c[child, parent] = rng.uniform(0.2, 2.0)
    for i in range(d):
        for j in range(i + 1, d):
            if c[i, j] == 0 and rng.random() < extra_edge_prob:
                c[i, j] = c[j, i] = rng.uniform(0.2, 2.0)
    return Network.from_weights(c)
