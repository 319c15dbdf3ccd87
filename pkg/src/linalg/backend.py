"""Dense linear-algebra contracts used by the intersection pipeline.

Everything here is a pure function over its inputs; LAPACK is reached through
scipy.linalg only.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from ..errors import ShapeMismatchError

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class NullSpaceResult:
    """Orthonormal right null vectors (columns of ``basis``) plus the spectrum they came from."""

    basis: np.ndarray
    rank: int
    singular_values: np.ndarray

    @property
    def nullity(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class GeneralizedEigenResult:
    """Eigenvalue pairs xi = alpha / beta with left eigenvectors.

    ``left_vectors[:, k]`` satisfies ``phi @ (A - xi_k B) = 0`` (plain transpose,
    no conjugation). ``beta == 0`` encodes an eigenvalue at infinity.
    """

    alpha: np.ndarray
    beta: np.ndarray
    left_vectors: np.ndarray

    @property
    def pairs(self) -> Tuple[Tuple[complex, float], ...]:
        return tuple(zip(self.alpha.tolist(), self.beta.tolist()))

    @property
    def is_infinite(self) -> np.ndarray:
        return self.beta == 0.0

    def eigenvalues(self) -> np.ndarray:
        """xi values; infinite pairs map to complex infinity."""
        values = np.full(self.alpha.shape, complex(np.inf, 0.0))
        finite = ~self.is_infinite
        values[finite] = self.alpha[finite] / self.beta[finite]
        return values


def _rank_threshold(singular_values: np.ndarray, shape: Tuple[int, int], rank_tol: Optional[float]) -> float:
    if singular_values.size == 0:
        return 0.0
    relative = rank_tol if rank_tol is not None else max(shape) * EPS
    return relative * singular_values[0]


def null_space(matrix, rank_tol: Optional[float] = None) -> NullSpaceResult:
    """Numerical right null space from a full SVD.

    The rank counts singular values above ``rank_tol * sigma_max`` (default
    ``max(m, n) * eps``). A zero matrix has a full null space.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        raise ShapeMismatchError("null_space needs a nonempty matrix")
    _, singular_values, vh = scipy.linalg.svd(matrix, full_matrices=True)
    threshold = _rank_threshold(singular_values, matrix.shape, rank_tol)
    if singular_values[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(singular_values > threshold))
    basis = vh[rank:].conj().T
    logger.debug("null_space: shape %s rank %d nullity %d", matrix.shape, rank, basis.shape[1])
    return NullSpaceResult(basis=basis, rank=rank, singular_values=singular_values)


def left_null_space(matrix, tol: float) -> np.ndarray:
    """Orthonormal rows spanning the numerical left null space (``K @ M ~ 0``)."""
    matrix = np.atleast_2d(np.asarray(matrix))
    u, singular_values, _ = scipy.linalg.svd(matrix, full_matrices=True)
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return u.T
    rank = int(np.count_nonzero(singular_values > tol * singular_values[0]))
    return u[:, rank:].T


def scale_columns(a, b) -> Tuple[np.ndarray, np.ndarray]:
    """Equilibrate pencil columns; eigenvalues and left eigenvectors are unchanged."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    norms = np.maximum(np.linalg.norm(a, axis=0), np.linalg.norm(b, axis=0))
    norms[norms == 0.0] = 1.0
    return a / norms, b / norms


def generalized_eig(a, b, infinite_tol: float = 1e-12) -> GeneralizedEigenResult:
    """QZ eigenvalue pairs and left eigenvectors of the square pencil (a, b).

    b may be singular. A pair whose |beta| is below ``infinite_tol`` times the
    pair's magnitude is reported with ``beta = 0``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"pencil matrices must be square and equal, got {a.shape} and {b.shape}")

    pairs, vl = scipy.linalg.eig(a, b, left=True, right=False, homogeneous_eigvals=True)
    alpha = np.asarray(pairs[0], dtype=complex)
    beta = np.asarray(pairs[1], dtype=complex).real

    # LAPACK leaves beta >= 0 in practice; enforce it so xi keeps its sign.
    flip = beta < 0
    alpha[flip] = -alpha[flip]
    beta[flip] = -beta[flip]

    magnitude = np.hypot(np.abs(alpha), beta)
    beta = np.where(beta <= infinite_tol * magnitude, 0.0, beta)

    left = vl.conj()
    norms = np.linalg.norm(left, axis=0)
    norms[norms == 0.0] = 1.0
    left = left / norms

    logger.debug("generalized_eig: %d pairs, %d infinite", len(alpha), int(np.sum(beta == 0.0)))
    return GeneralizedEigenResult(alpha=alpha, beta=beta, left_vectors=left)
