"""
Exact Gaussian pipeline for the two-coordinate chain.

With Gaussian noise every forward law started from a point is Gaussian, so
pi_k can be propagated exactly (mean and covariance). With a deterministic
cycle the chain is 2-periodic in law; pi is taken as the periodic fixed point
at the parity of the law it is compared with.

Parity is the 0-based coordinate updated last. Step k of the cycle updates
coordinate (k-1) mod 2, so parity(k) = (k-1) mod 2 and k=0 counts as parity 1.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_discrete_lyapunov
from scipy.special import ndtr, ndtri

from ..errors import PreconditionError
from ..model.gaussian import Gaussian2
from ..model.network import Network
from ..model.params import ModelParams
from ..model.reports import CurvePoint, TVCurve, TVEstimate
from ..model.state import SphereState
from ..value_object.scan import ScanMode, ScanPolicy
from .model_core import check_model, update_matrix
from .replica_streams import StreamTag, check_seed, replica_rng
from ...infrastructure.logging import get_logger

logger = get_logger(__name__)

EQUAL_COV_TOL = 1e-9
BOX_SIGMAS = 8.0
QUAD_START = 64
QUAD_MAX = 2048
# mass of a 2-D Gaussian outside its +-8 sd box
_BOX_TAIL = 2.0 * 2.0 * float(ndtr(-BOX_SIGMAS))


def _require_gaussian_d2(net: Network, params: ModelParams) -> None:
    d = check_model(net, params)
    if d != 2:
        raise PreconditionError(f"exact Gaussian pipeline is specialized to d=2, got d={d}")
    if not params.noise.is_gaussian:
        raise PreconditionError(
            f"exact Gaussian pipeline needs Gaussian noise, got {params.noise.kind.value}"
        )


def _require_cycle(scan: Optional[ScanPolicy]) -> None:
    if scan is not None and scan.mode is not ScanMode.CYCLE:
        raise PreconditionError(f"exact pipeline needs a deterministic cycle, got {scan.mode.value}")


def push_gaussian(net: Network, params: ModelParams, g: Gaussian2, i: int) -> Gaussian2:
    """Law of A_i X + sigma_i Z e_i for X ~ g."""
    _require_gaussian_d2(net, params)
    a = update_matrix(net, params, i)
    mean = a @ g.mean
    mean[i] += params.sigma[i] * params.noise.loc
    cov = a @ g.cov @ a.T
    cov[i, i] += params.sigma[i] ** 2
    return Gaussian2(mean, cov)


def push_sequence(net: Network, params: ModelParams, g: Gaussian2,
                  indices: Sequence[int]) -> Gaussian2:
    for i in indices:
        g = push_gaussian(net, params, g, i)
    return g


def period_map(net: Network, params: ModelParams, pattern: Sequence[int]
               ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Affine map of (mean, cov) over one pass of ``pattern``.

    Returns (M, c, Q) with mean -> M mean + c and cov -> M cov M^T + Q.
    """
    d = check_model(net, params)
    m = np.eye(d)
    c = np.zeros(d)
    q = np.zeros((d, d))
    var = params.noise.variance
    for i in pattern:
        a = update_matrix(net, params, i)
        m = a @ m
        c = a @ c
        c[i] += params.sigma[i] * params.noise.mean
        q = a @ q @ a.T
        q[i, i] += params.sigma[i] ** 2 * var
    return m, c, q


def stationary_moments(net: Network, params: ModelParams,
                       scan: Optional[ScanPolicy] = None,
                       phase: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of the stationary law, any d and any noise family.

    Random scan: fixed point of the averaged second-moment map
        S = (1/d) sum_i (A_i S A_i^T + sigma_i^2 var(Z) E_ii)
    solved as a d^2 linear system (mean-zero noise only).
    Deterministic scans: periodic fixed point at ``phase`` (steps taken modulo
    the cycle length, phase 0 = last update was the last pattern entry).
    """
    d = check_model(net, params)
    scan = scan or ScanPolicy.random()
    scan.validate(d)
    scan.require_coverage(d)
    if scan.is_random:
        if abs(params.noise.mean) > 1e-12:
            raise PreconditionError("random-scan moments need mean-zero noise")
        var = params.noise.variance
        op = np.eye(d * d)
        rhs = np.zeros((d, d))
        for i in range(d):
            a = update_matrix(net, params, i)
            op -= np.kron(a, a) / d
            rhs[i, i] += params.sigma[i] ** 2 * var / d
        cov = np.linalg.solve(op, rhs.reshape(-1)).reshape(d, d)
        return np.zeros(d), 0.5 * (cov + cov.T)
    pattern = scan.period(d)
    length = len(pattern)
    phase %= length
    rotated = [pattern[(phase + j) % length] for j in range(length)]
    m, c, q = period_map(net, params, rotated)
    mean = np.linalg.solve(np.eye(d) - m, c)
    cov = solve_discrete_lyapunov(m, q)
    return mean, 0.5 * (cov + cov.T)


def stationary_gaussian(net: Network, params: ModelParams, parity: int,
                        scan: Optional[ScanPolicy] = None) -> Gaussian2:
    """Periodic fixed point of the cyclic chain, given the coordinate updated last."""
    _require_gaussian_d2(net, params)
    _require_cycle(scan)
    if parity not in (0, 1):
        raise PreconditionError(f"parity must be 0 or 1, got {parity}")
    # parity 1 <=> an even number of steps taken
    mean, cov = stationary_moments(net, params, ScanPolicy.cycle(), phase=(parity + 1) % 2)
    return Gaussian2(mean, cov)


def _pdf_grid(g: Gaussian2, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    inv = np.linalg.inv(g.cov)
    det = np.linalg.det(g.cov)
    dx = xs[:, None] - g.mean[0]
    dy = ys[None, :] - g.mean[1]
    q = inv[0, 0] * dx * dx + 2.0 * inv[0, 1] * dx * dy + inv[1, 1] * dy * dy
    return np.exp(-0.5 * q) / (2.0 * math.pi * math.sqrt(det))


def _logpdf(g: Gaussian2, x: np.ndarray) -> np.ndarray:
    inv = np.linalg.inv(g.cov)
    diff = x - g.mean
    q = np.einsum('ni,ij,nj->n', diff, inv, diff)
    return -0.5 * q - math.log(2.0 * math.pi) - 0.5 * math.log(np.linalg.det(g.cov))


def _simpson_weights(lo: float, hi: float, n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (hi - lo) / (3.0 * n)


def _overlap_simpson(g1: Gaussian2, g2: Gaussian2, lo: np.ndarray, hi: np.ndarray,
                     n: int) -> float:
    xs = np.linspace(lo[0], hi[0], n + 1)
    ys = np.linspace(lo[1], hi[1], n + 1)
    f = np.minimum(_pdf_grid(g1, xs, ys), _pdf_grid(g2, xs, ys))
    return float(_simpson_weights(lo[0], hi[0], n) @ f @ _simpson_weights(lo[1], hi[1], n))


def _tv_closed(g1: Gaussian2, g2: Gaussian2) -> TVEstimate:
    diff = g1.mean - g2.mean
    if g1.is_singular():
        # equal degenerate covariances: the laws share a line only if diff lies on it
        cov_pinv = np.linalg.pinv(g1.cov)
        if np.linalg.norm(g1.cov @ cov_pinv @ diff - diff) > 1e-9 * max(1.0, np.abs(diff).max()):
            return TVEstimate(1.0, 0.0)
        delta = math.sqrt(max(float(diff @ cov_pinv @ diff), 0.0))
    else:
        delta = math.sqrt(max(float(diff @ np.linalg.solve(g1.cov, diff)), 0.0))
    return TVEstimate(float(2.0 * ndtr(delta / 2.0) - 1.0), 1e-15)


def _tv_quadrature(g1: Gaussian2, g2: Gaussian2, tol: float) -> TVEstimate:
    lo = np.maximum(g1.mean - BOX_SIGMAS * g1.std, g2.mean - BOX_SIGMAS * g2.std)
    hi = np.minimum(g1.mean + BOX_SIGMAS * g1.std, g2.mean + BOX_SIGMAS * g2.std)
    if np.any(hi <= lo):
        return TVEstimate(1.0, 2.0 * _BOX_TAIL)
    n = QUAD_START
    coarse = _overlap_simpson(g1, g2, lo, hi, n)
    while True:
        fine = _overlap_simpson(g1, g2, lo, hi, 2 * n)
        err = abs(fine - coarse)
        n *= 2
        if err < tol or n >= QUAD_MAX:
            break
        coarse = fine
    if err >= tol:
        logger.warning("quadrature did not reach tolerance", err=err, tol=tol, grid=n)
    tv = min(1.0, max(0.0, 1.0 - fine))
    return TVEstimate(tv, err + 2.0 * _BOX_TAIL)


def _tv_monte_carlo(g1: Gaussian2, g2: Gaussian2, samples: int, seed: int) -> TVEstimate:
    rng = replica_rng(check_seed(seed), StreamTag.TV_MONTE_CARLO, 0)
    chol = np.linalg.cholesky(g2.cov)
    x = g2.mean + rng.standard_normal((samples, 2)) @ chol.T
    f = np.maximum(0.0, 1.0 - np.exp(_logpdf(g1, x) - _logpdf(g2, x)))
    return TVEstimate(float(f.mean()), float(3.0 * f.std(ddof=1) / math.sqrt(samples)))


def tv_gaussian(g1: Gaussian2, g2: Gaussian2, method: str = "auto", *, tol: float = 1e-4,
                samples: int = 200_000, seed: int = 0) -> TVEstimate:
    """Total variation distance between two bivariate normals.

    Methods:
        closed:      equal covariances, 2 Phi(delta/2) - 1 with delta the Mahalanobis distance
        quadrature:  1 - integral of min(p1, p2) over the intersection of the +-8 sd boxes,
                     composite Simpson refined until successive grids agree within ``tol``
        monte-carlo: E_{g2}[max(0, 1 - p1/p2)], err is 3 standard errors
        auto:        closed when the covariances agree within 1e-9, else quadrature

    A singular law against a different law is at distance 1 under ``auto``.
    """
    equal_cov = np.allclose(g1.cov, g2.cov, rtol=0.0, atol=EQUAL_COV_TOL)
    if method == "auto":
        if equal_cov:
            return _tv_closed(g1, g2)
        if g1.is_singular() or g2.is_singular():
            return TVEstimate(1.0, 0.0)
        return _tv_quadrature(g1, g2, tol)
    if method == "closed":
        if not equal_cov:
            raise PreconditionError("closed form needs equal covariances")
        return _tv_closed(g1, g2)
    if method not in ("quadrature", "monte-carlo"):
        raise PreconditionError(f"unknown TV method {method!r}")
    if g1.is_singular() or g2.is_singular():
        raise PreconditionError(f"{method} needs positive definite covariances")
    if method == "quadrature":
        return _tv_quadrature(g1, g2, tol)
    return _tv_monte_carlo(g1, g2, samples, seed)


def tv_curve_exact(net: Network, params: ModelParams, ln_n: float,
                   x0_direction: SphereState, k_max: int, *,
                   scan: Optional[ScanPolicy] = None, method: str = "auto") -> TVCurve:
    """d_tv(pi_k, pi) for k = 0..k_max from X_0 = n * x0_direction."""
    _require_gaussian_d2(net, params)
    _require_cycle(scan)
    if k_max < 0:
        raise PreconditionError("k_max must be >= 0")
    stationary = [stationary_gaussian(net, params, parity) for parity in (0, 1)]
    g = Gaussian2.point_mass(x0_direction.scaled(ln_n).to_numpy())
    points: List[CurvePoint] = []
    for k in range(k_max + 1):
        if k > 0:
            g = push_gaussian(net, params, g, (k - 1) % 2)
        parity = (k - 1) % 2
        if g.is_singular():
            points.append(CurvePoint(k, 1.0, 0.0, parity, "singular"))
            continue
        used = method
        if method == "auto":
            equal = np.allclose(g.cov, stationary[parity].cov, rtol=0.0, atol=EQUAL_COV_TOL)
            used = "closed" if equal else "quadrature"
        est = tv_gaussian(g, stationary[parity], used)
        points.append(CurvePoint(k, est.tv, est.err, parity, used))
    logger.debug("exact tv curve", ln_n=ln_n, k_max=k_max)
    return TVCurve(ln_n=ln_n, points=points)


def _probit(tv: np.ndarray) -> np.ndarray:
    return np.log(2.0 * ndtri((1.0 + tv) / 2.0))


def crossing_k(ks: Sequence[float], tvs: Sequence[float], level: float = 0.5) -> Optional[float]:
    """First k where the curve drops to ``level``, interpolated.

    Between two points strictly inside (0, 1) the interpolation is linear in
    ln(2 Phi^{-1}((1 + tv)/2)), which is exact for a shifted Gaussian whose
    shift decays geometrically; otherwise plain linear interpolation.
    """
    ks = np.asarray(ks, dtype=np.float64)
    tvs = np.asarray(tvs, dtype=np.float64)
    for j in range(1, ks.size):
        t0, t1 = tvs[j - 1], tvs[j]
        if t0 > level >= t1:
            if 0.0 < t1 and t0 < 1.0:
                u0, u1, u = _probit(np.array([t0, t1, level]))
            else:
                u0, u1, u = t0, t1, level
            return float(ks[j - 1] + (u0 - u) / (u0 - u1) * (ks[j] - ks[j - 1]))
    return None
