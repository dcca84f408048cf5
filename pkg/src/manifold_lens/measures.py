"""Discrete probability measures and their covariances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import Subspace, projection_matrix


class MeasureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted atoms in R^D; weights are normalized to sum to one."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms[:, None]
        weights = np.array(self.weights, dtype=float).ravel()
        if atoms.ndim != 2 or atoms.shape[0] < 1:
            raise MeasureError("measure needs at least one atom")
        if weights.shape[0] != atoms.shape[0]:
            raise MeasureError("atoms and weights differ in length")
        if not (np.all(np.isfinite(atoms)) and np.all(np.isfinite(weights))):
            raise MeasureError("non-finite atoms or weights")
        if np.any(weights < 0):
            raise MeasureError("negative weight")
        total = weights.sum()
        if total <= 0:
            raise MeasureError("weights sum to zero")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights / total)

    @classmethod
    def empirical(cls, points) -> "DiscreteMeasure":
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        return cls(points, np.full(points.shape[0], 1.0 / points.shape[0]))

    @classmethod
    def dirac(cls, x) -> "DiscreteMeasure":
        return cls(np.atleast_2d(np.asarray(x, dtype=float)), [1.0])

    @property
    def ambient_dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    def mean(self) -> np.ndarray:
        return self.weights @ self.atoms

    def shifted(self, v) -> "DiscreteMeasure":
        return DiscreteMeasure(self.atoms + np.asarray(v, dtype=float), self.weights)

    def mapped(self, g) -> "DiscreteMeasure":
        """Pushforward under ``g`` applied to the (n, D) atom array."""
        return DiscreteMeasure(g(self.atoms), self.weights)

    def centered(self) -> "DiscreteMeasure":
        return self.shifted(-self.mean())


def covariance_about(mu: DiscreteMeasure, center) -> np.ndarray:
    """Second moment of ``mu`` about a fixed ``center``."""
    diff = mu.atoms - np.asarray(center, dtype=float)
    S = (diff * mu.weights[:, None]).T @ diff
    return 0.5 * (S + S.T)


def covariance(mu: DiscreteMeasure) -> np.ndarray:
    """Covariance matrix of ``mu``.

    For an empirical measure of ``x_1..x_m`` this is the biased sample
    covariance ``(1/m) sum (x_i - xbar)(x_i - xbar)^T``.
    """
    return covariance_about(mu, mu.mean())


def point_covariance(points) -> np.ndarray:
    """Covariance of the empirical measure of the rows of ``points``."""
    X = np.asarray(points, dtype=float)
    diff = X - X.mean(axis=0)
    S = diff.T @ diff / X.shape[0]
    return 0.5 * (S + S.T)


def restrict(mu: DiscreteMeasure, center, r: float) -> DiscreteMeasure:
    """Normalized restriction of ``mu`` to the open ball ``B_r(center)``."""
    if not r > 0:
        raise MeasureError("restriction radius must be positive")
    dist = np.linalg.norm(mu.atoms - np.asarray(center, dtype=float), axis=1)
    inside = (dist < r) & (mu.weights > 0)
    if not np.any(inside):
        raise MeasureError("empty restriction")
    return DiscreteMeasure(mu.atoms[inside], mu.weights[inside])


def reference_spectrum(d: int, D: int) -> np.ndarray:
    """Eigenvalues of the uniform unit d-disk covariance in R^D."""
    if not 0 <= d <= D:
        raise MeasureError("need 0 <= d <= D")
    values = np.zeros(D)
    values[:d] = 1.0 / (d + 2)
    return values


def reference_covariance(S: Subspace) -> np.ndarray:
    """Covariance of the uniform measure on the unit disk of ``S``."""
    return projection_matrix(S) / (S.dim + 2)


def reference_eig_gap(d: int, d_prime: int, D: int) -> float:
    """Closed-form distance between reference spectra of dims d <= d'."""
    if not 1 <= d <= d_prime <= D:
        raise MeasureError("need 1 <= d <= d' <= D")
    return math.sqrt((d_prime - d) * (d * d_prime + 4 * d + 4)) / ((d + 2) * (d_prime + 2))
