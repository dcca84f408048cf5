"""Dense symmetric linear algebra.

Eigendecomposition is done with a cyclic Jacobi method so that results are
reproducible bit for bit on a given platform and do not depend on LAPACK
driver choices.  Matrices are plain ``numpy`` arrays; :class:`Spectrum` and
:class:`Subspace` are small frozen containers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
SMALL_N = 32  # below this, scalar loops beat per-rotation numpy overhead
SYMMETRY_TOL = 1e-12


class LinalgError(ValueError):
    pass


def as_symmetric(A) -> np.ndarray:
    """Validate ``A`` as a finite square symmetric matrix and return a copy.

    Asymmetry up to ``SYMMETRY_TOL`` relative to the largest entry is
    removed by averaging with the transpose, so the result is exactly
    symmetric.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise LinalgError("invalid matrix: expected a non-empty square array")
    if not np.all(np.isfinite(A)):
        raise LinalgError("invalid matrix: non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOL * scale:
        raise LinalgError("invalid matrix: not symmetric")
    return 0.5 * (A + A.T)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted non-increasing with paired eigenvector columns."""

    eigvals: np.ndarray
    eigvecs: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigvals.shape[0]

    def top(self, k: int) -> "Subspace":
        return Subspace(self.eigvecs[:, :k])

    def reconstruct(self) -> np.ndarray:
        return (self.eigvecs * self.eigvals) @ self.eigvecs.T


@dataclass(frozen=True, eq=False)
class Subspace:
    """A k-dimensional subspace of R^D given by an orthonormal D x k basis."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.ndim != 2 or B.shape[1] < 1 or B.shape[1] > B.shape[0]:
            raise LinalgError("subspace basis must be D x k with 1 <= k <= D")
        gram = B.T @ B
        if np.max(np.abs(gram - np.eye(B.shape[1]))) > 1e-10:
            raise LinalgError("subspace basis columns are not orthonormal")
        object.__setattr__(self, "basis", B)

    @classmethod
    def from_span(cls, vectors) -> "Subspace":
        """Orthonormalize the columns of ``vectors`` (must be independent)."""
        V = np.array(vectors, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        Q, R = np.linalg.qr(V)
        if np.min(np.abs(np.diag(R))) < 1e-12 * max(1.0, np.max(np.abs(R))):
            raise LinalgError("spanning vectors are linearly dependent")
        return cls(Q)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def transform(self, Q) -> "Subspace":
        """Image of the subspace under an orthogonal map ``Q``."""
        return Subspace(np.asarray(Q, dtype=float) @ self.basis)


def _rotate(A, V, p, q):
    apq = A[p, q]
    if apq == 0.0:
        return
    theta = (A[q, q] - A[p, p]) / (2.0 * apq)
    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    col_p = A[:, p].copy()
    col_q = A[:, q]
    A[:, p] = c * col_p - s * col_q
    A[:, q] = s * col_p + c * col_q
    row_p = A[p, :].copy()
    row_q = A[q, :]
    A[p, :] = c * row_p - s * row_q
    A[q, :] = s * row_p + c * row_q
    A[p, q] = A[q, p] = 0.0
    vp = V[:, p].copy()
    vq = V[:, q]
    V[:, p] = c * vp - s * vq
    V[:, q] = s * vp + c * vq


def _rotate_lists(A, V, p, q):
    # scalar twin of _rotate with identical arithmetic; faster for small n
    apq = A[p][q]
    if apq == 0.0:
        return
    theta = (A[q][q] - A[p][p]) / (2.0 * apq)
    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    for row in A:
        x, y = row[p], row[q]
        row[p] = c * x - s * y
        row[q] = s * x + c * y
    Ap, Aq = A[p], A[q]
    for j in range(len(Ap)):
        x, y = Ap[j], Aq[j]
        Ap[j] = c * x - s * y
        Aq[j] = s * x + c * y
    Ap[q] = Aq[p] = 0.0
    for row in V:
        x, y = row[p], row[q]
        row[p] = c * x - s * y
        row[q] = s * x + c * y


def _jacobi_lists(A, threshold):
    n = len(A)
    V = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for _ in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0 * sum(A[i][j] * A[i][j] for i in range(n) for j in range(i + 1, n)))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate_lists(A, V, p, q)
    return np.array(A), np.array(V)


def sym_eig(A) -> Spectrum:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Pairs ``(p, q)`` are visited in row-major order.  Iteration stops once the
    off-diagonal Frobenius mass drops below ``1e-13 * ||A||_F`` or after 100
    sweeps.  Eigenvalues are stably sorted non-increasing and every
    eigenvector is signed so that its largest-magnitude entry is positive.

    Parameters
    ----------
    A : array_like, (D, D)
        Symmetric matrix with finite entries.

    Returns
    -------
    Spectrum
    """
    A = as_symmetric(A)
    n = A.shape[0]
    V = np.eye(n)
    scale = float(np.sqrt(np.sum(A * A)))
    if 1 < n <= SMALL_N and scale > 0.0:
        A, V = _jacobi_lists(A.tolist(), JACOBI_TOL * scale)
    elif n > 1 and scale > 0.0:
        threshold = JACOBI_TOL * scale
        iu = np.triu_indices(n, 1)
        for _ in range(JACOBI_MAX_SWEEPS):
            upper = A[iu]
            off = math.sqrt(2.0 * float(upper @ upper))
            if off < threshold:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    _rotate(A, V, p, q)
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    lead = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[lead, np.arange(n)] < 0.0, -1.0, 1.0)
    return Spectrum(w, V * signs)


def eigvalsh_sorted(A) -> np.ndarray:
    return sym_eig(A).eigvals


def operator_norm(A) -> float:
    """Spectral norm of a symmetric matrix, ``max |lambda|``."""
    w = sym_eig(A).eigvals
    return float(max(abs(w[0]), abs(w[-1])))


def frobenius_norm(A) -> float:
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise LinalgError("invalid matrix: non-finite entries")
    return float(np.sqrt(np.sum(A * A)))


def projection_matrix(S: Subspace) -> np.ndarray:
    B = S.basis
    P = B @ B.T
    return 0.5 * (P + P.T)


def singular_values(M) -> np.ndarray:
    """Singular values of a rectangular matrix, largest first.

    Uses the symmetric embedding ``[[0, M], [M^T, 0]]`` whose eigenvalues are
    ``+-sigma``; this keeps small singular values accurate in absolute terms.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    a, b = M.shape
    H = np.zeros((a + b, a + b))
    H[:a, a:] = M
    H[a:, :a] = M.T
    w = sym_eig(H).eigvals
    return np.clip(w[: min(a, b)], 0.0, None)


def principal_angle(S1: Subspace, S2: Subspace) -> float:
    """Largest principal angle between two equal-dimensional subspaces.

    The cosine route ``arccos(sigma_min(B1^T B2))`` loses accuracy near zero,
    so small angles are taken from the sine route
    ``arcsin(sigma_max((I - P2) B1))`` instead.
    """
    if S1.ambient_dim != S2.ambient_dim or S1.dim != S2.dim:
        raise LinalgError("principal_angle: dimension mismatch")
    B1, B2 = S1.basis, S2.basis
    residual = B1 - B2 @ (B2.T @ B1)
    angle = math.asin(float(np.clip(singular_values(residual)[0], 0.0, 1.0)))
    if angle >= math.pi / 4:
        sigma_min = float(np.clip(singular_values(B1.T @ B2)[-1], 0.0, 1.0))
        angle = math.acos(sigma_min)
    return angle


def davis_kahan_sides(A, B, k: int) -> tuple[float, float]:
    """Both sides of the Davis-Kahan sin-theta bound for the top-k spaces.

    Returns ``(sin angle(Pi(A,k), Pi(B,k)), ||A - B|| / (lambda_k - lambda_{k+1}))``
    with eigenvalues of ``A`` sorted non-increasing.
    """
    A = as_symmetric(A)
    B = as_symmetric(B)
    if A.shape != B.shape:
        raise LinalgError("davis_kahan_sides: shape mismatch")
    n = A.shape[0]
    if not 1 <= k < n:
        raise LinalgError("davis_kahan_sides: need 1 <= k < D")
    spec_a = sym_eig(A)
    gap = spec_a.eigvals[k - 1] - spec_a.eigvals[k]
    if gap <= 1e-12:
        raise LinalgError("degenerate gap")
    spec_b = sym_eig(B)
    lhs = math.sin(principal_angle(spec_a.top(k), spec_b.top(k)))
    rhs = operator_norm(A - B) / gap
    return lhs, rhs


def hoffman_wielandt_sides(A, B) -> tuple[float, float]:
    """``(||sorted eig(A) - sorted eig(B)||_2, ||A - B||_F)``."""
    A = as_symmetric(A)
    B = as_symmetric(B)
    if A.shape != B.shape:
        raise LinalgError("hoffman_wielandt_sides: shape mismatch")
    lhs = float(np.linalg.norm(sym_eig(A).eigvals - sym_eig(B).eigvals))
    return lhs, frobenius_norm(A - B)


def sorted_vector_distance(x, y) -> float:
    """Euclidean distance between the sorted versions of ``x`` and ``y``.

    Equals the minimum of ``||x - sigma(y)||`` over all permutations sigma.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise LinalgError("sorted_vector_distance: length mismatch")
    return float(np.linalg.norm(np.sort(x) - np.sort(y)))
