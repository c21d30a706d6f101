"""
linalg/kronecker.py
Matrix-free Kronecker products and cached eigendecompositions of separable precisions.

Vectors on an n1 x n2 grid are indexed as ``alpha[i * n2 + j]`` for cell (i, j),
which is the column-major vectorization of the n2 x n1 array
``reshape(alpha, n2, n1)``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.exceptions import DimensionMismatch, NotPositiveDefinite
from linalg.banded import BandedMatrix


def kron_mv(E3, E4, alpha) -> np.ndarray:
    """
    @brief (E3 kron E4) alpha without forming the Kronecker product
    @param E3: n1 x n1 matrix acting on the first axis
    @param E4: n2 x n2 matrix acting on the second axis
    @param alpha: Vector of length n1 * n2
    @return np.ndarray: vec[(E3 [E4 reshape(alpha, n2, n1)]^T)^T]
    """
    E3 = np.asarray(E3, dtype=float)
    E4 = np.asarray(E4, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    n1, n2 = E3.shape[1], E4.shape[1]
    if alpha.shape != (n1 * n2,):
        raise DimensionMismatch(f"Vector length {alpha.shape} != ({n1 * n2},)")
    inner = E4 @ alpha.reshape((n2, n1), order="F")
    return (E3 @ inner.T).T.reshape(-1, order="F")


@dataclass(frozen=True, eq=False)
class KroneckerEigen:
    """Eigendecompositions Q3 = E3 diag(lam3) E3^T and Q4 = E4 diag(lam4) E4^T."""

    E3: np.ndarray
    lam3: np.ndarray
    E4: np.ndarray
    lam4: np.ndarray

    def __post_init__(self):
        if np.min(self.lam3) <= 0 or np.min(self.lam4) <= 0:
            raise NotPositiveDefinite("Interaction precision has a non-positive eigenvalue")

    @classmethod
    def from_precisions(cls, Q3: BandedMatrix, Q4: BandedMatrix) -> "KroneckerEigen":
        lam3, E3 = _eig_symmetric_banded(Q3)
        lam4, E4 = _eig_symmetric_banded(Q4)
        return cls(E3, lam3, E4, lam4)

    @property
    def n1(self) -> int:
        return self.E3.shape[0]

    @property
    def n2(self) -> int:
        return self.E4.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of Q3 kron Q4 in grid order."""
        return np.outer(self.lam3, self.lam4).ravel()

    def rotate(self, v) -> np.ndarray:
        """(E3 kron E4)^T v"""
        return kron_mv(self.E3.T, self.E4.T, v)

    def unrotate(self, v) -> np.ndarray:
        """(E3 kron E4) v"""
        return kron_mv(self.E3, self.E4, v)


def _eig_symmetric_banded(Q: BandedMatrix):
    if not Q.is_symmetric():
        raise NotPositiveDefinite("Precision is not symmetric")
    try:
        return scipy.linalg.eig_banded(Q.bands[: Q.q + 1], lower=False)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"Eigendecomposition failed: {e}") from e


__all__ = ["kron_mv", "KroneckerEigen"]
