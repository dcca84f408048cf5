"""Independent brute-force references used by the tests."""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _transport_bases(n: int, m: int):
    """All bases of the n x m transportation polytope.

    Returns ``(cells, inverses)`` where ``cells[k]`` lists the ``n + m - 1``
    basic cells and ``inverses[k]`` maps the reduced marginals (last column
    constraint dropped) to the basic flows.
    """
    A = np.zeros((n + m, n * m))
    for i in range(n):
        for j in range(m):
            A[i, i * m + j] = 1.0
            A[n + j, i * m + j] = 1.0
    A = A[:-1]
    cells, invs = [], []
    for subset in itertools.combinations(range(n * m), n + m - 1):
        B = A[:, subset]
        if abs(np.linalg.det(B)) > 0.5:  # totally unimodular: det is 0 or +-1
            cells.append(subset)
            invs.append(np.linalg.inv(B))
    return np.array(cells), np.array(invs)


def transport_lp_vertex_min(a, b, C, tol: float = 1e-12) -> float:
    """Minimum cost over every vertex of the transportation polytope."""
    a, b, C = np.asarray(a, float), np.asarray(b, float), np.asarray(C, float)
    n, m = C.shape
    if n == 1 or m == 1:
        return float(np.sum(np.outer(a, b) * C))
    cells, invs = _transport_bases(n, m)
    rhs = np.concatenate([a, b])[:-1]
    flows = invs @ rhs
    feasible = np.all(flows >= -tol, axis=1)
    costs = np.sum(flows * C.ravel()[cells], axis=1)
    return float(costs[feasible].min())


def wasserstein_brute(mu, nu, p: float = 1.0) -> float:
    diff = mu.atoms[:, None, :] - nu.atoms[None, :, :]
    C = np.sqrt(np.sum(diff * diff, axis=-1)) ** p
    return max(transport_lp_vertex_min(mu.weights, nu.weights, C), 0.0) ** (1.0 / p)


def _ball_through(points):
    """Smallest ball with all ``points`` on its boundary (center in their affine hull)."""
    p0 = points[0]
    if len(points) == 1:
        return p0.copy(), 0.0
    V = points[1:] - p0
    G = V @ V.T
    rhs = 0.5 * np.sum(V * V, axis=1)
    try:
        lam = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        return None
    c = p0 + lam @ V
    return c, float(np.linalg.norm(c - p0))


def meb_brute(points) -> tuple[np.ndarray, float]:
    """Minimum enclosing ball by scanning all support sets of size <= D + 1."""
    points = np.asarray(points, float)
    D = points.shape[1]
    best = (None, math.inf)
    for size in range(1, min(D + 1, len(points)) + 1):
        for idx in itertools.combinations(range(len(points)), size):
            ball = _ball_through(points[list(idx)])
            if ball is None:
                continue
            c, r = ball
            if r < best[1] and np.all(np.linalg.norm(points - c, axis=1) <= r * (1 + 1e-9) + 1e-12):
                best = (c, r)
    return best


def sorted_distance_brute(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    return min(float(np.linalg.norm(x - y[list(perm)])) for perm in itertools.permutations(range(len(y))))


def circle_S1(theta: float) -> float:
    """Tangent radius limit for the uniform unit circle: c1 = 1/16, q = 11, d = 1."""
    return (1 / 16) * math.sin(theta) / 3 / 11


def random_symmetric(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) * scale
    return 0.5 * (A + A.T)
