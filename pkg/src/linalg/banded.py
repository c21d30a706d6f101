"""
linalg/banded.py
Band-stored square matrices and the O(n) kernels built on them.

Storage follows the LAPACK general-band layout: ``bands[q + i - j, j] == M[i, j]``
for the p sub-diagonals and q super-diagonals, i.e. column-major by diagonal
offset. Padding slots that do not map to a matrix entry are always zero.
"""

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
import scipy.linalg
from scipy.linalg import lapack
from scipy import sparse

from core.exceptions import (
    BandwidthMismatch,
    DimensionMismatch,
    NotPositiveDefinite,
    Singular,
)

# Pivots below this magnitude are treated as a singular matrix
PIVOT_FLOOR = 1e-300
SYMMETRY_RTOL = 1e-12


def _column_range(offset: int, n: int) -> slice:
    """Columns j for which the entry (j + offset, j) lies inside an n x n matrix."""
    return slice(max(0, -offset), min(n, n - offset))


@dataclass(frozen=True, eq=False)
class BandedMatrix:
    """
    Square n x n matrix with lower bandwidth p and upper bandwidth q.

    ``bands`` has shape (p + q + 1, n) and is read-only after construction.
    """

    n: int
    p: int
    q: int
    bands: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise DimensionMismatch(f"Matrix dimension must be positive, got {self.n}")
        if not (0 <= self.p < self.n and 0 <= self.q < self.n):
            raise BandwidthMismatch(
                f"Bandwidths (p={self.p}, q={self.q}) invalid for n={self.n}"
            )
        bands = np.array(self.bands, dtype=float)
        if bands.shape != (self.p + self.q + 1, self.n):
            raise DimensionMismatch(
                f"Band storage shape {bands.shape} != {(self.p + self.q + 1, self.n)}"
            )
        for offset in range(-self.q, self.p + 1):
            row = bands[self.q + offset]
            cols = _column_range(offset, self.n)
            row[: cols.start] = 0.0
            row[cols.stop :] = 0.0
        bands.setflags(write=False)
        object.__setattr__(self, "bands", bands)

    # ===== CONSTRUCTION =====

    @classmethod
    def from_dense(cls, matrix, p: int, q: int) -> "BandedMatrix":
        """Band-store a dense matrix; nonzeros outside the band are rejected."""
        M = np.asarray(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionMismatch(f"Expected a square matrix, got shape {M.shape}")
        n = M.shape[0]
        if np.any(np.triu(M, q + 1)) or np.any(np.tril(M, -p - 1)):
            raise BandwidthMismatch(f"Matrix has entries outside bandwidth ({p}, {q})")
        bands = np.zeros((p + q + 1, n))
        for offset in range(-q, p + 1):
            cols = _column_range(offset, n)
            j = np.arange(cols.start, cols.stop)
            bands[q + offset, cols] = M[j + offset, j]
        return cls(n, p, q, bands)

    @classmethod
    def from_diagonals(cls, n: int, diagonals: Mapping[int, np.ndarray]) -> "BandedMatrix":
        """
        Build from numpy-style diagonals: key k > 0 is the k-th super-diagonal,
        k < 0 a sub-diagonal; each value has length n - |k|.
        """
        p = max([0] + [-k for k in diagonals if k < 0])
        q = max([0] + [k for k in diagonals if k > 0])
        bands = np.zeros((p + q + 1, n))
        for k, values in diagonals.items():
            values = np.asarray(values, dtype=float)
            if values.shape != (n - abs(k),):
                raise DimensionMismatch(
                    f"Diagonal {k} has length {values.shape}, expected {n - abs(k)}"
                )
            offset = -k
            bands[q + offset, _column_range(offset, n)] = values
        return cls(n, p, q, bands)

    @classmethod
    def from_sparse(cls, matrix, p: int, q: int) -> "BandedMatrix":
        """Band-store a scipy.sparse square matrix."""
        S = sparse.coo_matrix(matrix)
        if S.shape[0] != S.shape[1]:
            raise DimensionMismatch(f"Expected a square matrix, got shape {S.shape}")
        n = S.shape[0]
        offsets = S.row - S.col
        keep = S.data != 0
        if np.any(offsets[keep] > p) or np.any(offsets[keep] < -q):
            raise BandwidthMismatch(f"Sparse matrix has entries outside bandwidth ({p}, {q})")
        bands = np.zeros((p + q + 1, n))
        np.add.at(bands, (q + offsets, S.col), S.data)
        return cls(n, p, q, bands)

    @classmethod
    def identity(cls, n: int) -> "BandedMatrix":
        return cls(n, 0, 0, np.ones((1, n)))

    # ===== ACCESS =====

    def diagonal(self, k: int = 0) -> np.ndarray:
        """numpy-style k-th diagonal (k > 0 above the main diagonal)."""
        offset = -k
        if offset > self.p or offset < -self.q:
            return np.zeros(max(self.n - abs(k), 0))
        return self.bands[self.q + offset, _column_range(offset, self.n)].copy()

    def to_dense(self) -> np.ndarray:
        M = np.zeros((self.n, self.n))
        for offset in range(-self.q, self.p + 1):
            cols = _column_range(offset, self.n)
            j = np.arange(cols.start, cols.stop)
            M[j + offset, j] = self.bands[self.q + offset, cols]
        return M

    @property
    def is_lower(self) -> bool:
        return self.q == 0

    @property
    def is_upper(self) -> bool:
        return self.p == 0

    # ===== ALGEBRA =====

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"Vector length {x.shape[0]} != {self.n}")
        y = np.zeros_like(x)
        for offset in range(-self.q, self.p + 1):
            cols = _column_range(offset, self.n)
            band = self.bands[self.q + offset, cols]
            if x.ndim > 1:
                band = band[:, None]
            y[cols.start + offset : cols.stop + offset] += band * x[cols]
        return y

    def __matmul__(self, x):
        return self.matvec(x)

    def transpose(self) -> "BandedMatrix":
        return BandedMatrix.from_diagonals(
            self.n,
            {-k: self.diagonal(k) for k in range(-self.p, self.q + 1)},
        )

    @property
    def T(self) -> "BandedMatrix":
        return self.transpose()

    def scaled(self, factor: float) -> "BandedMatrix":
        return BandedMatrix(self.n, self.p, self.q, self.bands * factor)

    def __add__(self, other: "BandedMatrix") -> "BandedMatrix":
        if not isinstance(other, BandedMatrix):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"Cannot add {self.n}x{self.n} and {other.n}x{other.n}")
        p, q = max(self.p, other.p), max(self.q, other.q)
        bands = np.zeros((p + q + 1, self.n))
        bands[q - self.q : q + self.p + 1] += self.bands
        bands[q - other.q : q + other.p + 1] += other.bands
        return BandedMatrix(self.n, p, q, bands)

    def add_diagonal(self, values) -> "BandedMatrix":
        bands = self.bands.copy()
        bands[self.q] += np.broadcast_to(np.asarray(values, dtype=float), (self.n,))
        return BandedMatrix(self.n, self.p, self.q, bands)

    def is_symmetric(self, rtol: float = SYMMETRY_RTOL) -> bool:
        if self.p != self.q:
            return False
        scale = max(1.0, float(np.max(np.abs(self.bands))))
        for k in range(1, self.p + 1):
            if np.max(np.abs(self.diagonal(k) - self.diagonal(-k)), initial=0.0) > rtol * scale:
                return False
        return True


# ===== FACTORIZATIONS =====


def banded_cholesky(M: BandedMatrix) -> BandedMatrix:
    """
    @brief Lower Cholesky factor R of a symmetric positive definite band matrix
    @param M: SPD matrix with p == q
    @return BandedMatrix: R with the lower bandwidth of M, R @ R.T == M
    @raises BandwidthMismatch: If the band is not symmetric in shape
    @raises NotPositiveDefinite: If a pivot is not positive
    """
    if M.p != M.q:
        raise BandwidthMismatch(f"Cholesky needs p == q, got p={M.p}, q={M.q}")
    if not M.is_symmetric():
        raise NotPositiveDefinite("Matrix is not symmetric within tolerance")
    try:
        factor = scipy.linalg.cholesky_banded(M.bands[M.q :], lower=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NotPositiveDefinite(f"Banded Cholesky failed: {e}") from e
    return BandedMatrix(M.n, M.p, 0, factor)


def cholesky_solve(R: BandedMatrix, b) -> np.ndarray:
    """Solve (R R^T) x = b given the lower Cholesky factor R."""
    b = np.asarray(b, dtype=float)
    if b.shape[0] != R.n:
        raise DimensionMismatch(f"Right-hand side length {b.shape[0]} != {R.n}")
    return scipy.linalg.cho_solve_banded((R.bands, True), b)


def cholesky_logdet(R: BandedMatrix) -> float:
    """log det(R R^T) from the diagonal of R."""
    return 2.0 * float(np.sum(np.log(R.bands[0])))


def _check_pivots(pivots: np.ndarray) -> None:
    if not np.all(np.isfinite(pivots)) or np.min(np.abs(pivots)) < PIVOT_FLOOR:
        raise Singular("Matrix is numerically singular (pivot underflow)")


def solve_banded(M: BandedMatrix, b) -> np.ndarray:
    """
    @brief Solve M x = b in O(n (p + q)) operations
    @param M: Nonsingular band matrix
    @param b: Right-hand side of length n (or n x k)
    @return np.ndarray: Solution x
    @raises Singular: If an LU pivot underflows
    """
    b = np.asarray(b, dtype=float)
    if b.shape[0] != M.n:
        raise DimensionMismatch(f"Right-hand side length {b.shape[0]} != {M.n}")
    if M.p == 0 or M.q == 0:
        _check_pivots(M.bands[M.q])
    if M.p == 0 and M.q == 0:
        d = M.bands[0]
        return b / (d[:, None] if b.ndim > 1 else d)
    try:
        x = scipy.linalg.solve_banded((M.p, M.q), M.bands, b)
    except np.linalg.LinAlgError as e:
        raise Singular(f"Banded solve failed: {e}") from e
    if not np.all(np.isfinite(x)):
        raise Singular("Banded solve produced non-finite values")
    return x


def logdet_banded(M: BandedMatrix, assume_spd: bool = False) -> float:
    """
    @brief log |det M| via banded LU, or via the Cholesky diagonal for SPD input
    @param M: Nonsingular band matrix
    @param assume_spd: Use the Cholesky path (raises NotPositiveDefinite if not SPD)
    @return float: log of the absolute determinant
    """
    if assume_spd:
        return cholesky_logdet(banded_cholesky(M))

    if M.p == 0 or M.q == 0:
        diag = M.bands[M.q]
        _check_pivots(diag)
        return float(np.sum(np.log(np.abs(diag))))

    if M.p == 1 and M.q == 1:
        return logdet_tridiagonal(M.bands[2, :-1], M.bands[1], M.bands[0, 1:])

    work = np.vstack([np.zeros((M.p, M.n)), M.bands])
    lu, _, info = lapack.dgbtrf(work, M.p, M.q)
    if info > 0:
        raise Singular(f"Banded LU hit a zero pivot at row {info}")
    pivots = lu[M.p + M.q]
    _check_pivots(pivots)
    return float(np.sum(np.log(np.abs(pivots))))


def logdet_tridiagonal(sub, diag, sup) -> float:
    """log |det| of the tridiagonal matrix with the given sub-, main and super-diagonal."""
    if len(diag) == 1:
        _check_pivots(np.asarray(diag, dtype=float))
        return float(np.log(abs(diag[0])))
    _, d, _, _, _, info = lapack.dgttrf(
        np.array(sub, dtype=float), np.array(diag, dtype=float), np.array(sup, dtype=float)
    )
    if info > 0:
        raise Singular(f"Tridiagonal LU hit a zero pivot at row {info}")
    _check_pivots(d)
    return float(np.sum(np.log(np.abs(d))))


def normal_form(L: BandedMatrix) -> BandedMatrix:
    """
    @brief Form L^T L directly in band storage
    @param L: Any band matrix
    @return BandedMatrix: Symmetric product with bandwidth p + q on both sides
    """
    n, p, q = L.n, L.p, L.q
    width = min(p + q, n - 1)
    diagonals = {}
    for d in range(width + 1):
        acc = np.zeros(n - d)
        # (L^T L)[j, j + d] = sum_k L[k, j] L[k, j + d] with k = j + a
        for a in range(-q, p + 1):
            b = a - d
            if b < -q or b > p:
                continue
            j0, j1 = max(0, -a), min(n - d, n - a)
            if j1 <= j0:
                continue
            acc[j0:j1] += L.bands[q + a, j0:j1] * L.bands[q + b, j0 + d : j1 + d]
        diagonals[d] = acc
        if d:
            diagonals[-d] = acc
    return BandedMatrix.from_diagonals(n, diagonals)


def sample_from_precision(P: BandedMatrix, b, noise, factor: Optional[BandedMatrix] = None):
    """
    @brief Draw from N(P^-1 b, P^-1) by Cholesky perturbation
    @param P: SPD band precision
    @param b: Canonical mean vector (P mu = b)
    @param noise: Standard normal vector of length n
    @param factor: Optional precomputed lower Cholesky factor of P
    @return np.ndarray: mu + R^-T noise
    """
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (P.n,):
        raise DimensionMismatch(f"Noise length {noise.shape} != ({P.n},)")
    R = factor if factor is not None else banded_cholesky(P)
    mean = cholesky_solve(R, b)
    if not np.any(noise):
        return mean
    return mean + solve_banded(R.transpose(), noise)


__all__ = [
    "BandedMatrix",
    "banded_cholesky",
    "cholesky_solve",
    "cholesky_logdet",
    "solve_banded",
    "logdet_banded",
    "logdet_tridiagonal",
    "normal_form",
    "sample_from_precision",
]
