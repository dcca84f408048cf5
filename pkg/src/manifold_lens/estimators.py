"""Local PCA estimators of tangent spaces and intrinsic dimension.

For a sample ``x_1..x_m`` and radius ``r`` the neighborhood of ``x_i`` is
``{x_j : j != i, ||x_j - x_i|| < r}``.  Its mean-centered empirical covariance
drives three estimators: the span of the top-k eigenvectors (tangent space),
the tail-threshold rule ``thr`` on the eigenvalues (dimension), and the
rescaled covariance ``(d + 2) / r^2 * Sigma`` (projector).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import PointCloud
from .linalg import Subspace, principal_angle, sym_eig
from .measures import point_covariance

TIE_TOL = 1e-12
TREE_THRESHOLD = 100_000
DEFAULT_ETA = 0.05


class EstimatorError(ValueError):
    pass


class InsufficientNeighborhood(EstimatorError):
    def __init__(self, count, needed):
        super().__init__(f"insufficient neighborhood: {count} neighbors, need {needed}")
        self.count, self.needed = count, needed


class EigenvalueTieWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EstimatorParams:
    r: float
    k: int | None = None
    eta: float | None = None
    rho: float = 1.0
    d: int | None = None

    def __post_init__(self):
        if not self.r > 0:
            raise EstimatorError("r must be positive")
        if self.eta is not None and not 0 < self.eta < 1:
            raise EstimatorError("eta must lie in (0, 1)")
        if self.k is not None and self.k < 1:
            raise EstimatorError("k must be >= 1")
        if not 0 < self.rho <= 1:
            raise EstimatorError("rho must lie in (0, 1]")


@dataclass(eq=False)
class LocalEstimate:
    index: int
    neighbor_count: int
    eigvals: np.ndarray | None = None
    tangent: Subspace | None = None
    d_hat: int | None = None
    p_hat: np.ndarray | None = None
    angle: float | None = None
    warn_tie: bool = False
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(eq=False)
class BatchResult:
    estimates: list
    max_angle: float | None
    all_dims_correct: bool | None
    failures: int = 0
    summary: dict = field(default_factory=dict)


class NeighborIndex:
    """Fixed-radius neighbor queries with strict inequality.

    ``"brute"`` scans all points; ``"tree"`` prefilters with a k-d tree and
    then applies the same strict distance test, so both return identical sets.
    """

    def __init__(self, points, method: str = "auto"):
        self.points = np.asarray(points, dtype=float)
        if method == "auto":
            method = "tree" if len(self.points) > TREE_THRESHOLD else "brute"
        if method not in ("brute", "tree"):
            raise EstimatorError(f"unknown neighbor method {method!r}")
        self.method = method
        self._tree = cKDTree(self.points) if method == "tree" else None

    def query(self, i: int, r: float) -> np.ndarray:
        x = self.points[i]
        if self._tree is None:
            cand = np.arange(len(self.points))
        else:
            cand = np.asarray(sorted(self._tree.query_ball_point(x, r)), dtype=int)
            if cand.size == 0:
                return cand
        diff = self.points[cand] - x
        dist = np.sqrt(np.sum(diff * diff, axis=1))
        keep = (dist < r) & (cand != i)
        return cand[keep]


def neighbors(points, i: int, r: float, method: str = "brute") -> np.ndarray:
    """Indices ``j != i`` with ``||x_j - x_i|| < r``, ascending."""
    if isinstance(points, PointCloud):
        points = points.points
    if not r > 0:
        raise EstimatorError("r must be positive")
    if not 0 <= i < len(points):
        raise EstimatorError("index out of range")
    return NeighborIndex(points, method).query(i, r)


def thr(eigvals, eta: float) -> int:
    """Smallest k whose tail ``lambda_{k+1} + ... + lambda_D`` is at most ``eta`` times the total."""
    lam = np.asarray(eigvals, dtype=float).ravel()
    if np.any(np.diff(lam) > 0):
        raise EstimatorError("eigenvalues must be sorted non-increasing")
    if not 0 < eta < 1:
        raise EstimatorError("eta must lie in (0, 1)")
    lam = np.clip(lam, 0.0, None)
    total = float(lam.sum())
    if total == 0.0:
        return 0
    # tails[k] = lambda_{k+1} + ... + lambda_D (1-based), k = 0..D
    tails = np.concatenate([np.cumsum(lam[::-1])[::-1], [0.0]])
    return int(np.argmax(tails <= eta * total))


def _local_points(points, i, r, index=None):
    idx = index.query(i, r) if index is not None else neighbors(points, i, r)
    return idx, points[idx]


def local_spectrum(points, i: int, r: float, index: NeighborIndex | None = None):
    """Neighbor indices and Jacobi spectrum of the local covariance at ``x_i``."""
    points = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    idx, nb = _local_points(points, i, r, index)
    if len(idx) < 2:
        raise InsufficientNeighborhood(len(idx), 2)
    return idx, sym_eig(point_covariance(nb))


def _tie(eigvals, k):
    return k < len(eigvals) and abs(eigvals[k - 1] - eigvals[k]) <= TIE_TOL * max(1.0, abs(eigvals[0]))


def tangent_estimate(points, r: float, k: int, i: int, index: NeighborIndex | None = None) -> Subspace:
    """Span of the top-k eigenvectors of the local covariance at ``x_i``.

    Emits :class:`EigenvalueTieWarning` when ``lambda_k`` and ``lambda_{k+1}``
    coincide, since the subspace is then not well defined.
    """
    points = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    if not 1 <= k <= points.shape[1]:
        raise EstimatorError("need 1 <= k <= D")
    idx, nb = _local_points(points, i, r, index)
    if len(idx) < max(2, k + 1):
        raise InsufficientNeighborhood(len(idx), max(2, k + 1))
    spec = sym_eig(point_covariance(nb))
    if _tie(spec.eigvals, k):
        warnings.warn("eigenvalue tie at the k/k+1 boundary", EigenvalueTieWarning, stacklevel=2)
    return spec.top(k)


def dimension_estimate(points, r: float, eta: float, i: int, index: NeighborIndex | None = None) -> int:
    _, spec = local_spectrum(points, i, r, index)
    return thr(spec.eigvals, eta)


def projector_estimate(points, r: float, i: int, d: int, index: NeighborIndex | None = None) -> np.ndarray:
    """``(d + 2) / r^2`` times the local covariance at ``x_i``."""
    points = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    idx, nb = _local_points(points, i, r, index)
    if len(idx) < 2:
        raise InsufficientNeighborhood(len(idx), 2)
    return (d + 2) / r**2 * point_covariance(nb)


def estimate_point(points, i, params: EstimatorParams, index=None, truth=None) -> LocalEstimate:
    idx = index.query(i, params.r) if index is not None else neighbors(points, i, params.r)
    est = LocalEstimate(index=int(i), neighbor_count=int(len(idx)))
    needed = max(2, params.k + 1) if params.k is not None else 2
    if len(idx) < needed:
        est.error = str(InsufficientNeighborhood(len(idx), needed))
        return est
    cov = point_covariance(points[idx])
    spec = sym_eig(cov)
    est.eigvals = spec.eigvals
    if params.k is not None:
        est.tangent = spec.top(params.k)
        est.warn_tie = bool(_tie(spec.eigvals, params.k))
        if truth is not None and truth.dim == params.k:
            est.angle = principal_angle(est.tangent, truth)
    if params.eta is not None:
        est.d_hat = thr(spec.eigvals, params.eta)
    if params.d is not None:
        est.p_hat = (params.d + 2) / params.r**2 * cov
    return est


def batch_estimate(cloud, params: EstimatorParams, method: str = "auto") -> BatchResult:
    """Run the local estimators on points ``0 .. floor(rho * m) - 1``.

    Per-point failures are recorded on the estimate and counted; they do not
    stop the run.  ``max_angle`` compares tangent estimates with the cloud's
    ground-truth tangents; ``all_dims_correct`` compares ``d_hat`` with the
    true intrinsic dimension.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud.from_points(cloud)
    m = cloud.m
    count = max(1, int(math.floor(params.rho * m + 1e-9)))
    index = NeighborIndex(cloud.points, method)
    has_truth = bool(cloud.metadata.get("has_ground_truth", True))
    estimates = []
    for i in range(count):
        truth = cloud.tangent(i) if (has_truth and params.k is not None) else None
        estimates.append(estimate_point(cloud.points, i, params, index, truth))
    failures = sum(not e.ok for e in estimates)
    angles = [e.angle for e in estimates if e.angle is not None]
    max_angle = None
    if params.k is not None and has_truth:
        max_angle = math.inf if failures else (max(angles) if angles else None)
    all_dims = None
    if params.eta is not None and has_truth:
        all_dims = failures == 0 and all(e.d_hat == cloud.d for e in estimates)
    summary = {
        "processed": count,
        "failures": failures,
        "ties": sum(e.warn_tie for e in estimates),
        "mean_neighbors": float(np.mean([e.neighbor_count for e in estimates])),
        "min_neighbors": int(min(e.neighbor_count for e in estimates)),
    }
    return BatchResult(estimates, max_angle, all_dims, failures, summary)
