"""Exact Wasserstein distances between discrete measures.

The transportation problem is solved on the complete bipartite graph with a
primal network simplex.  The initial basis is the northwest-corner tree,
entering arcs are priced by most negative reduced cost (lowest index on ties)
and, after a long run of degenerate pivots, the solver switches permanently
to Bland's rule, which cannot cycle.

Equal-size uniform measures are an assignment problem; by Birkhoff's theorem
an optimal permutation is an optimal plan, so ``method="auto"`` hands them to
:func:`scipy.optimize.linear_sum_assignment`.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import operator_norm
from .measures import DiscreteMeasure, covariance

MEB_EXACT_MAX_DIM = 10


class TransportError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Sparse coupling: ``mass[k]`` moves from source ``rows[k]`` to target ``cols[k]``."""

    rows: np.ndarray
    cols: np.ndarray
    mass: np.ndarray
    cost: float
    shape: tuple
    potentials: tuple | None = field(default=None, repr=False)

    def dense(self) -> np.ndarray:
        G = np.zeros(self.shape)
        np.add.at(G, (self.rows, self.cols), self.mass)
        return G

    def as_dict(self) -> dict:
        return {(int(i), int(j)): float(w) for i, j, w in zip(self.rows, self.cols, self.mass)}


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> np.ndarray:
    diff = mu.atoms[:, None, :] - nu.atoms[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    return dist if p == 1 else dist**p


def _northwest_corner(a, b):
    n, m = len(a), len(b)
    rs, rd = a.astype(float).copy(), b.astype(float).copy()
    arcs, flows = [], []
    i = j = 0
    while True:
        x = max(0.0, min(rs[i], rd[j]))
        arcs.append((i, j))
        flows.append(x)
        rs[i] -= x
        rd[j] -= x
        if i == n - 1 and j == m - 1:
            break
        if i == n - 1:
            j += 1
        elif j == m - 1:
            i += 1
        elif rs[i] <= rd[j]:
            i += 1
        else:
            j += 1
    return arcs, flows


class _Tree:
    """Spanning-tree basis over row nodes ``0..n-1`` and column nodes ``n..n+m-1``."""

    def __init__(self, n, m, arcs, flows):
        self.n, self.m = n, m
        self.adj = [set() for _ in range(n + m)]
        self.flow = np.zeros((n, m))
        self.basic = np.zeros((n, m), dtype=bool)
        for (i, j), x in zip(arcs, flows):
            self.add(i, j)
            self.flow[i, j] = x

    def add(self, i, j):
        self.adj[i].add(self.n + j)
        self.adj[self.n + j].add(i)
        self.basic[i, j] = True

    def remove(self, i, j):
        self.adj[i].discard(self.n + j)
        self.adj[self.n + j].discard(i)
        self.basic[i, j] = False

    def potentials(self, C):
        n = self.n
        pot = np.zeros(n + self.m)
        seen = [False] * (n + self.m)
        seen[0] = True
        queue = deque([0])
        while queue:
            node = queue.popleft()
            for nb in self.adj[node]:
                if not seen[nb]:
                    seen[nb] = True
                    if node < n:
                        pot[nb] = C[node, nb - n] - pot[node]
                    else:
                        pot[nb] = C[nb, node - n] - pot[node]
                    queue.append(nb)
        return pot[:n], pot[n:]

    def path(self, src, dst):
        parent = {src: None}
        queue = deque([src])
        while queue:
            node = queue.popleft()
            if node == dst:
                break
            for nb in self.adj[node]:
                if nb not in parent:
                    parent[nb] = node
                    queue.append(nb)
        out = [dst]
        while out[-1] != src:
            out.append(parent[out[-1]])
        return out[::-1]


def network_simplex(a, b, C, max_iter: int | None = None):
    """Solve ``min <C, G>`` over couplings ``G`` of ``a`` and ``b``.

    Returns
    -------
    flow : ndarray, (n, m)
    u, v : ndarray
        Dual potentials with ``C - u_i - v_j >= 0`` and equality on the basis.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    C = np.asarray(C, dtype=float)
    n, m = C.shape
    tree = _Tree(n, m, *_northwest_corner(a, b))
    tol = 1e-12 * max(1.0, float(np.max(np.abs(C)))) if C.size else 0.0
    if max_iter is None:
        max_iter = 50 * (n + m) * max(n, m) + 1000
    degenerate_run = 0
    bland = False
    for _ in range(max_iter):
        u, v = tree.potentials(C)
        reduced = C - u[:, None] - v[None, :]
        eligible = (reduced < -tol) & ~tree.basic
        if not eligible.any():
            return tree.flow, u, v
        if bland:
            flat = int(np.argmax(eligible))
        else:
            flat = int(np.argmin(np.where(eligible, reduced, np.inf)))
        k, l = divmod(flat, m)
        path = tree.path(n + l, k)
        # path runs col l -> ... -> row k; its arcs alternate -, +, -, ...
        minus, plus = [], []
        for step, (x, y) in enumerate(zip(path[:-1], path[1:])):
            arc = (y, x - n) if x >= n else (x, y - n)
            (minus if step % 2 == 0 else plus).append(arc)
        theta = min(tree.flow[arc] for arc in minus)
        candidates = [arc for arc in minus if tree.flow[arc] <= theta]
        leave = min(candidates, key=lambda arc: arc[0] * m + arc[1])
        for arc in minus:
            tree.flow[arc] = max(0.0, tree.flow[arc] - theta)
        for arc in plus:
            tree.flow[arc] += theta
        tree.flow[k, l] = theta
        tree.flow[leave] = 0.0
        tree.remove(*leave)
        tree.add(k, l)
        if theta == 0.0:
            degenerate_run += 1
            if degenerate_run > n + m + 50:
                bland = True
        else:
            degenerate_run = 0
    raise TransportError("network simplex did not converge")


def _plan_from_dense(G, C, potentials=None):
    rows, cols = np.nonzero(G > 0)
    mass = G[rows, cols]
    return TransportPlan(rows, cols, mass, float(np.sum(mass * C[rows, cols])), G.shape, potentials)


def _is_uniform(mu):
    return np.all(mu.weights == mu.weights[0])


def wasserstein(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float = 1.0,
                method: str = "auto", check: bool = False):
    """Exact ``W_p(mu, nu)`` and an optimal plan.

    Parameters
    ----------
    p : float
        Any real ``p >= 1``; the cost is ``||a_i - b_j||^p`` and the root is
        taken once at the end.
    method : {"auto", "simplex", "assignment"}
        ``"auto"`` uses the assignment solver for equal-size uniform
        measures and the network simplex otherwise.
    check : bool
        Verify primal feasibility and complementary slackness of the result
        (forces the network simplex, which produces dual potentials).

    Returns
    -------
    distance : float
    plan : TransportPlan
    """
    if mu.ambient_dim != nu.ambient_dim:
        raise TransportError("measures live in different dimensions")
    if not p >= 1:
        raise TransportError("p must be >= 1")
    C = cost_matrix(mu, nu, p)
    if check:
        method = "simplex"
    if method == "auto":
        method = "assignment" if mu.size == nu.size and _is_uniform(mu) and _is_uniform(nu) else "simplex"
    if method == "assignment":
        if mu.size != nu.size:
            raise TransportError("assignment needs equal-size measures")
        rows, cols = linear_sum_assignment(C)
        G = np.zeros(C.shape)
        G[rows, cols] = 1.0 / mu.size
        plan = _plan_from_dense(G, C)
    elif method == "simplex":
        G, u, v = network_simplex(mu.weights, nu.weights, C)
        plan = _plan_from_dense(G, C, (u, v))
        if check:
            verify_plan(plan, mu.weights, nu.weights, C)
    else:
        raise TransportError(f"unknown method {method!r}")
    return max(plan.cost, 0.0) ** (1.0 / p), plan


def verify_plan(plan: TransportPlan, a, b, C, tol: float = 1e-10):
    """Raise unless ``plan`` is feasible and certified optimal by its duals."""
    G = plan.dense()
    if np.any(G < 0):
        raise TransportError("negative mass in plan")
    if np.max(np.abs(G.sum(axis=1) - a)) > tol or np.max(np.abs(G.sum(axis=0) - b)) > tol:
        raise TransportError("plan marginals do not match")
    if plan.potentials is None:
        raise TransportError("plan carries no dual potentials")
    u, v = plan.potentials
    reduced = C - u[:, None] - v[None, :]
    scale = max(1.0, float(np.max(np.abs(C))))
    if np.min(reduced) < -tol * scale:
        raise TransportError("dual infeasible: negative reduced cost")
    if np.any(np.abs(reduced[G > 0]) > tol * scale):
        raise TransportError("complementary slackness violated")


def monotonicity_check(mu, nu, p: float, q: float) -> tuple[float, float]:
    """``(W_p, W_q)`` for ``1 <= p <= q``; the first never exceeds the second."""
    if not 1 <= p <= q:
        raise TransportError("need 1 <= p <= q")
    return wasserstein(mu, nu, p)[0], wasserstein(mu, nu, q)[0]


# minimum enclosing ball ---------------------------------------------------

def _circumball(support):
    if not support:
        return None, -1.0
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    A = np.array([s - p0 for s in support[1:]])
    G = A @ A.T
    rhs = 0.5 * np.diag(G)
    lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
    center = p0 + lam @ A
    radius = max(float(np.linalg.norm(s - center)) for s in support)
    return center, radius


def _inside(x, center, radius):
    if center is None:
        return False
    return np.linalg.norm(x - center) <= radius * (1 + 1e-12) + 1e-14


def _welzl(P, n, support, dim):
    center, radius = _circumball(support)
    if len(support) == dim + 1:
        return center, radius
    for i in range(n):
        if not _inside(P[i], center, radius):
            center, radius = _welzl(P, i, support + [P[i]], dim)
    return center, radius


def min_enclosing_ball(points, seed: int = 0):
    """Smallest ball containing all ``points`` (Welzl, randomized order).

    Returns ``(center, radius, exact)``.  Above ``MEB_EXACT_MAX_DIM`` the ball
    is Ritter's approximation (or the ball about the first point, whichever
    is smaller) and ``exact`` is False; its radius is at most twice optimal.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n, dim = P.shape
    if dim <= MEB_EXACT_MAX_DIM:
        order = np.random.default_rng(seed).permutation(n)
        center, radius = _welzl(P[order], n, [], dim)
        return center, radius, True
    far = P[np.argmax(np.linalg.norm(P - P[0], axis=1))]
    other = P[np.argmax(np.linalg.norm(P - far, axis=1))]
    center = 0.5 * (far + other)
    radius = 0.5 * float(np.linalg.norm(far - other))
    for x in P:
        dist = float(np.linalg.norm(x - center))
        if dist > radius:
            radius_new = 0.5 * (radius + dist)
            center = center + (dist - radius_new) / dist * (x - center)
            radius = radius_new
    radius = max(radius, float(np.max(np.linalg.norm(P - center, axis=1))))
    point_radius = float(np.max(np.linalg.norm(P - P[0], axis=1)))
    if point_radius < radius:
        center, radius = P[0].copy(), point_radius
    return center, radius, False


def _certified_radius(mu: DiscreteMeasure, r: float) -> tuple[float, float]:
    """Return ``(radius_used, slack)`` after checking the support fits in ``B_r``."""
    _, radius, exact = min_enclosing_ball(mu.atoms[mu.weights > 0])
    if radius <= r * (1 + 1e-9):
        return r, 1.0
    if not exact and radius <= 2 * r * (1 + 1e-9):
        return 2 * r, 2.0
    raise TransportError(f"support does not fit in a ball of radius {r}")


# witnesses -----------------------------------------------------------------

def covariance_lipschitz_witness(mu, nu, r: float, p: float = 1.0) -> tuple[float, float]:
    """``(||Sigma[mu] - Sigma[nu]||, 8 r W_p(mu, nu))``.

    Both supports must fit in (possibly different) balls of radius ``r``.  In
    ambient dimension above ``MEB_EXACT_MAX_DIM`` an uncertified support may
    be accepted with ``r`` doubled on the right-hand side.
    """
    if not r > 0:
        raise TransportError("r must be positive")
    r_mu, _ = _certified_radius(mu, r)
    r_nu, _ = _certified_radius(nu, r)
    lhs = operator_norm(covariance(mu) - covariance(nu))
    rhs = 8.0 * max(r_mu, r_nu) * wasserstein(mu, nu, p)[0]
    return lhs, rhs


def centering_witness(mu, nu, p: float = 1.0) -> tuple[float, float, float]:
    """``(||E mu - E nu||, W_p(mu, nu), W_p(centered mu, centered nu))``."""
    mean_gap = float(np.linalg.norm(mu.mean() - nu.mean()))
    wp = wasserstein(mu, nu, p)[0]
    wp_centered = wasserstein(mu.centered(), nu.centered(), p)[0]
    return mean_gap, wp, wp_centered


def density_flattening_witness(base: DiscreteMeasure, f, p: float = 1.0) -> tuple[float, float]:
    """``(W_p(mu_f, base), (max f - min f) * diam(supp base))``.

    ``mu_f`` reweights atom ``i`` by ``f[i] * w_i``; ``f`` must integrate to
    one against ``base``.
    """
    f = np.asarray(f, dtype=float).ravel()
    if f.shape[0] != base.size:
        raise TransportError("need one density value per atom")
    if np.any(f < 0):
        raise TransportError("density must be non-negative")
    if abs(float(f @ base.weights) - 1.0) > 1e-9:
        raise TransportError("density is not normalized against the base measure")
    reweighted = DiscreteMeasure(base.atoms, f * base.weights)
    wp = wasserstein(reweighted, base, p)[0]
    diff = base.atoms[:, None, :] - base.atoms[None, :, :]
    diameter = float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))
    return wp, float(f.max() - f.min()) * diameter
