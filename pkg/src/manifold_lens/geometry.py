"""Synthetic manifolds with analytic reach, tangents, foot points and geodesics.

Four families are provided: round spheres ``S^d`` of radius ``R`` sitting in
the first ``d+1`` coordinates of ``R^D``, the flat Clifford torus in ``R^4``,
the standard ring torus in ``R^3`` and a flat d-disk (a control case with
boundary).  Densities are either uniform or sinusoidal,
``phi(x) = (1 + a w(x)) / vol(M)`` where ``w`` is the sine of the model's
first angular coordinate.  Noise is either absent, an independent uniform
draw from the ball of radius ``s``, or a deterministic function of the clean
point.

Sampling is split into fixed blocks of ``BLOCK`` consecutive indices and each
block draws from its own stream seeded by ``(seed, block)``, so the output is
a function of the seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import Subspace

BLOCK = 1024
SQRT2_M1 = math.sqrt(2.0) - 1.0


class GeometryError(ValueError):
    pass


def unit_ball_volume(d: int) -> float:
    """Volume of the unit d-ball, via the half-integer Gamma recurrence."""
    if d < 0:
        raise GeometryError("dimension must be non-negative")
    # Gamma(d/2 + 1) built up from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi)
    x, gamma = (1.0, 1.0) if d % 2 == 0 else (0.5, math.sqrt(math.pi))
    while x < d / 2 + 1:
        gamma *= x
        x += 1.0
    return math.pi ** (d / 2) / gamma


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), int(block)]))


def uniform_ball(n: int, d: int, rng, radius: float = 1.0) -> np.ndarray:
    """``n`` uniform points in the d-ball of the given radius."""
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.random(n) ** (1.0 / d))[:, None]


def uniform_disk(n: int, basis, rng, radius: float = 1.0, center=None) -> np.ndarray:
    """Uniform points on the disk ``center + span(basis)`` of given radius."""
    basis = np.asarray(basis, dtype=float)
    pts = uniform_ball(n, basis.shape[1], rng, radius) @ basis.T
    return pts if center is None else pts + np.asarray(center, dtype=float)


def _invert_cdf(cdf, pdf, u, lo, hi, iters=60):
    """Vectorized safeguarded Newton inversion of a strictly increasing CDF."""
    a = np.full_like(u, lo)
    b = np.full_like(u, hi)
    x = lo + (hi - lo) * u
    for _ in range(iters):
        f = cdf(x) - u
        a = np.where(f < 0, x, a)
        b = np.where(f >= 0, x, b)
        step = x - f / pdf(x)
        x = np.where((step > a) & (step < b), step, 0.5 * (a + b))
        if np.max(b - a) < 1e-15 * (hi - lo):
            break
    return x


def _householder_complement(u):
    """Orthonormal bases of the complement of unit vectors ``u`` (rows), shape (n, k, k-1)."""
    n, k = u.shape
    e = np.zeros(k)
    e[0] = 1.0
    w = u - e
    sign_flip = np.linalg.norm(w, axis=1) < 1e-8
    w = np.where(sign_flip[:, None], u + e, w)
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    H = np.eye(k)[None] - 2.0 * w[:, :, None] * w[:, None, :]
    return H[:, :, 1:]


@dataclass(frozen=True)
class DensityModel:
    kind: str = "uniform"
    a: float = 0.5

    def __post_init__(self):
        if self.kind not in ("uniform", "sinusoidal"):
            raise GeometryError(f"unknown density kind {self.kind!r}")
        if self.kind == "sinusoidal" and not abs(self.a) < 1:
            raise GeometryError("sinusoidal density needs |a| < 1")

    @property
    def amplitude(self) -> float:
        return 0.0 if self.kind == "uniform" else float(self.a)


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"
    s: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "iid_ball", "dependent"):
            raise GeometryError(f"unknown noise kind {self.kind!r}")
        if self.s < 0:
            raise GeometryError("noise radius must be non-negative")
        if self.kind == "none" and self.s != 0:
            object.__setattr__(self, "s", 0.0)

    @property
    def radius(self) -> float:
        return 0.0 if self.kind == "none" else float(self.s)


class ManifoldModel:
    """Base class; subclasses provide the analytic oracles."""

    name = "manifold"
    has_geodesic = True
    has_exp = False
    supports_sinusoidal = True

    def __init__(self, d: int, D: int, reach: float):
        if not (1 <= d < D):
            raise GeometryError("need 1 <= d < D")
        if not reach > 0:
            raise GeometryError("reach must be positive")
        self.d, self.D, self.reach = int(d), int(D), float(reach)

    @property
    def capabilities(self) -> dict:
        return {"has_geodesic": self.has_geodesic, "has_exp": self.has_exp,
                "has_analytic_phi": self.has_geodesic}

    def params(self) -> dict:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name, "d": self.d, "D": self.D, "reach": self.reach, **self.params()}

    # subclasses implement
    def volume(self) -> float:
        raise NotImplementedError

    def _uniform_clean(self, n, rng):
        raise NotImplementedError

    def foot_point(self, y):
        raise NotImplementedError

    def tangent_basis(self, x):
        """Orthonormal tangent bases at points ``x`` on M, shape (n, D, d)."""
        raise NotImplementedError

    def normal_vector(self, x):
        """A unit normal at each point of ``x``, shape (n, D)."""
        raise NotImplementedError

    def wave(self, x):
        """Sine of the first angular coordinate, in [-1, 1]."""
        raise NotImplementedError

    def first_angle(self, x):
        raise NotImplementedError

    def wave_lipschitz(self) -> float:
        raise NotImplementedError

    def geodesic_distance(self, x, y):
        raise GeometryError(f"{self.name} has no geodesic distance oracle")

    def exp_map(self, x, v):
        raise GeometryError(f"{self.name} has no exponential map oracle")

    def _sample_sinusoidal(self, n, a, rng):
        """Default: rejection against the uniform law; returns (points, proposals)."""
        out, proposals = [], 0
        need = n
        while need > 0:
            batch = max(16, int(need * (1 + abs(a)) * 1.2) + 8)
            x = self._uniform_clean(batch, rng)
            proposals += batch
            accept = rng.random(batch) * (1 + abs(a)) < 1 + a * self.wave(x)
            out.append(x[accept][:need])
            need -= out[-1].shape[0]
        return np.concatenate(out), proposals

    def tangent(self, x) -> Subspace:
        return Subspace(self.tangent_basis(np.atleast_2d(x))[0])

    # density helpers
    def density(self, density: DensityModel, x):
        x = np.atleast_2d(x)
        return (1.0 + density.amplitude * self.wave(x)) / self.volume()

    def density_stats(self, density: DensityModel) -> dict:
        a = abs(density.amplitude)
        vol = self.volume()
        return {"phi_min": (1 - a) / vol, "phi_max": (1 + a) / vol,
                "alpha": a * self.wave_lipschitz() / vol if a > 0 else 0.0}


class SphereModel(ManifoldModel):
    name = "sphere"
    has_exp = True

    def __init__(self, d: int, D: int, R: float = 1.0):
        if not (1 <= d and d + 1 <= D):
            raise GeometryError("sphere S^d needs d + 1 <= D")
        if not R > 0:
            raise GeometryError("radius must be positive")
        super().__init__(d, D, R)
        self.R = float(R)

    def params(self):
        return {"R": self.R}

    def volume(self):
        # area of S^d is (d + 1) * omega_{d+1} * R^d
        return (self.d + 1) * unit_ball_volume(self.d + 1) * self.R**self.d

    def _embed(self, y):
        out = np.zeros((y.shape[0], self.D))
        out[:, : self.d + 1] = y
        return out

    def _uniform_clean(self, n, rng):
        g = rng.standard_normal((n, self.d + 1))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return self._embed(self.R * g)

    def _sample_sinusoidal(self, n, a, rng):
        if self.d != 1:
            return super()._sample_sinusoidal(n, a, rng)
        u = rng.random(n)
        two_pi = 2 * math.pi
        theta = _invert_cdf(lambda t: (t + a * (1 - np.cos(t))) / two_pi,
                            lambda t: (1 + a * np.sin(t)) / two_pi, u, 0.0, two_pi)
        y = self.R * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return self._embed(y), n

    def foot_point(self, y):
        y = np.atleast_2d(y)
        head = y[:, : self.d + 1]
        norm = np.linalg.norm(head, axis=1, keepdims=True)
        if np.any(norm == 0):
            raise GeometryError("foot point undefined at the sphere center")
        return self._embed(self.R * head / norm)

    def normal_vector(self, x):
        x = np.atleast_2d(x)
        return x / np.linalg.norm(x, axis=1, keepdims=True)

    def tangent_basis(self, x):
        x = np.atleast_2d(x)
        u = x[:, : self.d + 1] / np.linalg.norm(x[:, : self.d + 1], axis=1, keepdims=True)
        if self.d == 1:
            t = np.stack([-u[:, 1], u[:, 0]], axis=1)[:, :, None]
        else:
            t = _householder_complement(u)
        out = np.zeros((x.shape[0], self.D, self.d))
        out[:, : self.d + 1, :] = t
        return out

    def first_angle(self, x):
        x = np.atleast_2d(x)
        return np.arctan2(x[:, 1], x[:, 0])

    def wave(self, x):
        x = np.atleast_2d(x)
        return np.clip(x[:, self.d] / self.R, -1.0, 1.0)

    def wave_lipschitz(self):
        return 1.0 / self.R

    def geodesic_distance(self, x, y):
        x, y = np.atleast_2d(x), np.atleast_2d(y)
        c = np.sum(x * y, axis=1) / self.R**2
        return self.R * np.arccos(np.clip(c, -1.0, 1.0))

    def exp_map(self, x, v):
        x, v = np.atleast_2d(x), np.atleast_2d(v)
        nv = np.linalg.norm(v, axis=1, keepdims=True)
        safe = np.where(nv > 0, nv, 1.0)
        return np.cos(nv / self.R) * x + self.R * np.sin(nv / self.R) * v / safe


class CliffordTorusModel(ManifoldModel):
    name = "clifford_torus"
    has_exp = True

    def __init__(self, r1: float = 1.0, r2: float = 1.0):
        if not (r1 > 0 and r2 > 0):
            raise GeometryError("radii must be positive")
        super().__init__(2, 4, min(r1, r2))
        self.r1, self.r2 = float(r1), float(r2)

    def params(self):
        return {"r1": self.r1, "r2": self.r2}

    def volume(self):
        return 4 * math.pi**2 * self.r1 * self.r2

    def embed(self, t1, t2):
        return np.stack([self.r1 * np.cos(t1), self.r1 * np.sin(t1),
                         self.r2 * np.cos(t2), self.r2 * np.sin(t2)], axis=1)

    def angles(self, x):
        x = np.atleast_2d(x)
        return np.arctan2(x[:, 1], x[:, 0]), np.arctan2(x[:, 3], x[:, 2])

    def _uniform_clean(self, n, rng):
        return self.embed(2 * math.pi * rng.random(n), 2 * math.pi * rng.random(n))

    def _sample_sinusoidal(self, n, a, rng):
        two_pi = 2 * math.pi
        t1 = _invert_cdf(lambda t: (t + a * (1 - np.cos(t))) / two_pi,
                         lambda t: (1 + a * np.sin(t)) / two_pi, rng.random(n), 0.0, two_pi)
        return self.embed(t1, two_pi * rng.random(n)), n

    def foot_point(self, y):
        y = np.atleast_2d(y)
        n1 = np.linalg.norm(y[:, :2], axis=1, keepdims=True)
        n2 = np.linalg.norm(y[:, 2:], axis=1, keepdims=True)
        if np.any(n1 == 0) or np.any(n2 == 0):
            raise GeometryError("foot point undefined on the medial set")
        return np.concatenate([self.r1 * y[:, :2] / n1, self.r2 * y[:, 2:] / n2], axis=1)

    def tangent_basis(self, x):
        t1, t2 = self.angles(x)
        out = np.zeros((t1.shape[0], 4, 2))
        out[:, 0, 0], out[:, 1, 0] = -np.sin(t1), np.cos(t1)
        out[:, 2, 1], out[:, 3, 1] = -np.sin(t2), np.cos(t2)
        return out

    def normal_vector(self, x):
        t1, t2 = self.angles(x)
        return np.stack([np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2)], axis=1) / math.sqrt(2)

    def first_angle(self, x):
        return self.angles(x)[0]

    def wave(self, x):
        return np.sin(self.angles(x)[0])

    def wave_lipschitz(self):
        return 1.0 / self.r1

    def geodesic_distance(self, x, y):
        a1, a2 = self.angles(x)
        b1, b2 = self.angles(y)
        d1 = np.abs(np.angle(np.exp(1j * (a1 - b1))))
        d2 = np.abs(np.angle(np.exp(1j * (a2 - b2))))
        return np.sqrt((self.r1 * d1) ** 2 + (self.r2 * d2) ** 2)

    def exp_map(self, x, v):
        x, v = np.atleast_2d(x), np.atleast_2d(v)
        t1, t2 = self.angles(x)
        T = self.tangent_basis(x)
        coords = np.einsum("nDk,nD->nk", T, v)
        return self.embed(t1 + coords[:, 0] / self.r1, t2 + coords[:, 1] / self.r2)


class Torus3DModel(ManifoldModel):
    """Ring torus with tube radius ``r`` around a circle of radius ``R``."""

    name = "torus3d"
    has_geodesic = False
    supports_sinusoidal = False

    def __init__(self, R: float = 2.0, r: float = 0.5):
        if not (r > 0 and R > 2 * r):
            raise GeometryError("reach formula out of validated range (need R > 2r > 0)")
        super().__init__(2, 3, r)
        self.R, self.r = float(R), float(r)

    def params(self):
        return {"R": self.R, "r": self.r}

    def volume(self):
        return 4 * math.pi**2 * self.R * self.r

    def embed(self, u, v):
        rho = self.R + self.r * np.cos(v)
        return np.stack([rho * np.cos(u), rho * np.sin(u), self.r * np.sin(v)], axis=1)

    def angles(self, x):
        x = np.atleast_2d(x)
        u = np.arctan2(x[:, 1], x[:, 0])
        v = np.arctan2(x[:, 2], np.hypot(x[:, 0], x[:, 1]) - self.R)
        return u, v

    def _uniform_clean(self, n, rng):
        # area element is proportional to R + r cos v
        two_pi = 2 * math.pi
        R, r = self.R, self.r
        v = _invert_cdf(lambda t: (R * t + r * np.sin(t)) / (two_pi * R),
                        lambda t: (R + r * np.cos(t)) / (two_pi * R), rng.random(n), 0.0, two_pi)
        return self.embed(two_pi * rng.random(n), v)

    def foot_point(self, y):
        y = np.atleast_2d(y)
        rho = np.hypot(y[:, 0], y[:, 1])
        if np.any(rho == 0):
            raise GeometryError("foot point undefined on the symmetry axis")
        core = np.stack([self.R * y[:, 0] / rho, self.R * y[:, 1] / rho, np.zeros(len(y))], axis=1)
        off = y - core
        norm = np.linalg.norm(off, axis=1, keepdims=True)
        if np.any(norm == 0):
            raise GeometryError("foot point undefined on the core circle")
        return core + self.r * off / norm

    def tangent_basis(self, x):
        u, v = self.angles(x)
        out = np.zeros((u.shape[0], 3, 2))
        out[:, :, 0] = np.stack([-np.sin(u), np.cos(u), np.zeros_like(u)], axis=1)
        out[:, :, 1] = np.stack([-np.sin(v) * np.cos(u), -np.sin(v) * np.sin(u), np.cos(v)], axis=1)
        return out

    def normal_vector(self, x):
        u, v = self.angles(x)
        return np.stack([np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), np.sin(v)], axis=1)

    def first_angle(self, x):
        return self.angles(x)[0]

    def wave(self, x):
        return np.sin(self.angles(x)[0])

    def wave_lipschitz(self):
        return 1.0 / (self.R - self.r)


class DiskModel(ManifoldModel):
    """Flat d-disk of radius ``R`` in the first d coordinates (has boundary)."""

    name = "disk"
    has_exp = True
    supports_sinusoidal = False

    def __init__(self, d: int, D: int, R: float = 1.0):
        if not R > 0:
            raise GeometryError("radius must be positive")
        super().__init__(d, D, math.inf)
        self.R = float(R)

    def params(self):
        return {"R": self.R}

    def volume(self):
        return unit_ball_volume(self.d) * self.R**self.d

    def _uniform_clean(self, n, rng):
        out = np.zeros((n, self.D))
        out[:, : self.d] = uniform_ball(n, self.d, rng, self.R)
        return out

    def foot_point(self, y):
        y = np.atleast_2d(y)
        out = np.zeros_like(y)
        head = y[:, : self.d]
        norm = np.linalg.norm(head, axis=1, keepdims=True)
        scale = np.where(norm > self.R, self.R / np.where(norm > 0, norm, 1.0), 1.0)
        out[:, : self.d] = head * scale
        return out

    def tangent_basis(self, x):
        n = np.atleast_2d(x).shape[0]
        out = np.zeros((n, self.D, self.d))
        out[:, : self.d, :] = np.eye(self.d)
        return out

    def normal_vector(self, x):
        out = np.zeros((np.atleast_2d(x).shape[0], self.D))
        out[:, self.d] = 1.0
        return out

    def first_angle(self, x):
        x = np.atleast_2d(x)
        return np.arctan2(x[:, 1], x[:, 0]) if self.d >= 2 else np.where(x[:, 0] >= 0, 0.0, math.pi)

    def wave(self, x):
        return np.sin(self.first_angle(x))

    def wave_lipschitz(self):
        return math.inf

    def geodesic_distance(self, x, y):
        return np.linalg.norm(np.atleast_2d(x) - np.atleast_2d(y), axis=1)

    def exp_map(self, x, v):
        return np.atleast_2d(x) + np.atleast_2d(v)


def sphere_model(d: int, D: int, R: float = 1.0) -> SphereModel:
    return SphereModel(d, D, R)


def clifford_torus_model(r1: float = 1.0, r2: float = 1.0) -> CliffordTorusModel:
    return CliffordTorusModel(r1, r2)


def torus3d_model(R: float = 2.0, r: float = 0.5) -> Torus3DModel:
    return Torus3DModel(R, r)


def disk_model(d: int, D: int, R: float = 1.0) -> DiskModel:
    return DiskModel(d, D, R)


def dependent_direction(model: ManifoldModel, x) -> np.ndarray:
    """Unit noise direction used by the dependent noise model.

    The unit normal at ``x`` is rotated towards the first tangent direction by
    ``(pi/3) sin(theta)``, ``theta`` being the first angular coordinate, so
    the noise is a fixed deterministic function of the clean point.
    """
    x = np.atleast_2d(x)
    beta = (math.pi / 3) * np.sin(model.first_angle(x))
    nrm = model.normal_vector(x)
    tan = model.tangent_basis(x)[:, :, 0]
    return np.cos(beta)[:, None] * nrm + np.sin(beta)[:, None] * tan


def _clamp_noise(clean, Y, s):
    """Shrink ``Y`` where rounding puts ``clean + Y`` farther than ``s`` from ``clean``."""
    points = clean + Y
    for _ in range(8):
        dist = np.linalg.norm(points - clean, axis=1)
        bad = dist > s
        if not np.any(bad):
            break
        Y[bad] *= (s / dist[bad] * (1 - 2.0**-50))[:, None]
        points = clean + Y
    return points


@dataclass(eq=False)
class PointCloud:
    """Noisy sample with ground truth.

    ``tangents`` holds the true tangent bases at the foot points, shape
    ``(m, D, d)``.
    """

    points: np.ndarray
    clean: np.ndarray
    foot: np.ndarray
    tangents: np.ndarray
    seed: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def D(self) -> int:
        return self.points.shape[1]

    @property
    def d(self) -> int:
        return self.tangents.shape[2]

    def tangent(self, i: int) -> Subspace:
        return Subspace(self.tangents[i])

    @classmethod
    def from_points(cls, points, d: int | None = None, metadata: dict | None = None) -> "PointCloud":
        """Wrap raw points without ground truth (tangents are NaN)."""
        points = np.asarray(points, dtype=float)
        m, D = points.shape
        d = 1 if d is None else d
        return cls(points, points.copy(), points.copy(), np.full((m, D, d), np.nan), 0,
                   dict(metadata or {}, has_ground_truth=False))


def _sample_clean(model, density, n, rng):
    if density.kind == "uniform":
        return model._uniform_clean(n, rng), n
    if not model.supports_sinusoidal:
        raise GeometryError(f"{model.name} only supports the uniform density")
    return model._sample_sinusoidal(n, density.a, rng)


def sample(model: ManifoldModel, density: DensityModel, noise: NoiseModel, m: int, seed: int) -> PointCloud:
    """Draw ``m`` i.i.d. points from the law of ``X + Y``.

    ``X`` follows ``density`` on ``model`` and ``Y`` follows ``noise``.  The
    result is a deterministic function of ``seed``.
    """
    if m < 1:
        raise GeometryError("m must be positive")
    s = noise.radius
    if s >= model.reach:
        raise GeometryError("noise exceeds reach")
    clean_parts, noise_parts, proposals = [], [], 0
    for block, start in enumerate(range(0, m, BLOCK)):
        n = min(BLOCK, m - start)
        rng = block_rng(seed, block)
        x, used = _sample_clean(model, density, n, rng)
        proposals += used
        if noise.kind == "iid_ball":
            y = uniform_ball(n, model.D, rng, s)
        elif noise.kind == "dependent":
            y = s * dependent_direction(model, x)
        else:
            y = np.zeros_like(x)
        clean_parts.append(x)
        noise_parts.append(y)
    clean = np.concatenate(clean_parts)
    Y = np.concatenate(noise_parts)
    points = _clamp_noise(clean, Y, s) if s > 0 else clean.copy()
    foot = model.foot_point(points) if s > 0 else clean.copy()
    tangents = model.tangent_basis(foot)
    metadata = {
        "model": model.describe(),
        "density": {"kind": density.kind, "a": density.amplitude},
        "noise": {"kind": noise.kind, "s": s},
        "m": int(m),
        "seed": int(seed),
        "proposals": int(proposals),
        "has_ground_truth": True,
    }
    return PointCloud(points, clean, foot, tangents, int(seed), metadata)


def estimate_phi(model: ManifoldModel, density: DensityModel, x_foot, rho: float,
                 n_mc: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of ``mu0(geodesic ball B(x, rho)) / (omega_d rho^d)``.

    Returns ``(estimate, standard_error)``.
    """
    if not model.has_geodesic:
        raise GeometryError(f"{model.name} lacks a geodesic distance oracle")
    if not rho > 0:
        raise GeometryError("rho must be positive")
    cloud = sample(model, density, NoiseModel(), n_mc, seed)
    dist = model.geodesic_distance(np.broadcast_to(np.atleast_2d(x_foot), cloud.clean.shape), cloud.clean)
    frac = float(np.mean(dist < rho))
    norm = unit_ball_volume(model.d) * rho**model.d
    return frac / norm, math.sqrt(frac * (1 - frac) / n_mc) / norm


def geodesic_chord_witness(model: ManifoldModel, x, y) -> tuple[float, float, float]:
    """``(geodesic, chord, chord + chord^2 / reach)`` for two points of M."""
    if not model.has_geodesic:
        raise GeometryError(f"{model.name} lacks a geodesic distance oracle")
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    chord = float(np.linalg.norm(x - y))
    if chord > SQRT2_M1 * model.reach:
        raise GeometryError("chord too large: need chord <= (sqrt(2) - 1) * reach")
    geo = float(model.geodesic_distance(x, y)[0])
    return geo, chord, chord + chord**2 / model.reach


def circle_ball_mass(r: float, R: float = 1.0) -> float:
    """Uniform-circle mass of an ambient ball of radius ``r`` centered on the circle."""
    if r >= 2 * R:
        return 1.0
    beta = 2.0 * math.asin(r / (2.0 * R))
    return 2.0 * beta / (2.0 * math.pi)
