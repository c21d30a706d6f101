"""
additive/model.py
Additive 2-D model y = A1 z1 + A2 z2 + A3 z3 + eps on a complete n1 x n2 grid.

z1 and z2 are 1-D non-stationary fields along each axis; z3 is an interaction
field with separable precision Q_u3 kron Q_u4. Cells without an observation
(missing or in the extended border) are imputed every sweep, so A3 = I and
the Kronecker eigen-method applies.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy import sparse

from core.exceptions import DataFormatError, DimensionMismatch, NotPositiveDefinite
from data.grid import Grid1D, NODE_TOLERANCE
from field.likelihood import LinearObservations, marginal_loglik
from field.spde import SpdeConfig, precision
from linalg.kronecker import KroneckerEigen
from models.run_types import DeterminantPath
from samplers.kernels import AdaptiveScale

LOG_2PI = math.log(2.0 * math.pi)

MISSING = -1
EXTENSION = -2


@dataclass(frozen=True, eq=False)
class Grid2D:
    """
    Complete grid of the additive model.

    Cell (i, j) has vec index i * n2 + j; ``cell_rows`` maps it to its data row,
    MISSING or EXTENSION.
    """

    axis1: Grid1D
    axis2: Grid1D
    cell_rows: np.ndarray

    def __post_init__(self):
        if self.cell_rows.shape != (self.size,):
            raise DimensionMismatch(f"Cell map has shape {self.cell_rows.shape}, grid has {self.size} cells")

    @classmethod
    def from_observations(cls, x, axis1: Grid1D, axis2: Grid1D, missing=None) -> "Grid2D":
        """
        @brief Map observation rows onto the cells of two (extended) axis grids
        @param x: (m, 2) observation coordinates, each on a grid node
        @param axis1: Grid along x1
        @param axis2: Grid along x2
        @param missing: Optional (m,) flags of rows whose response is unusable
        @return Grid2D
        @raises DataFormatError: If a row is off the grid or two rows share a cell
        """
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != 2:
            raise DataFormatError(f"Expected (m, 2) coordinates, got shape {x.shape}")
        missing = np.zeros(x.shape[0], dtype=bool) if missing is None else np.asarray(missing, dtype=bool)

        def node_index(values, axis: Grid1D) -> np.ndarray:
            position = (values - axis.lo) / axis.h
            index = np.rint(position)
            if np.any(np.abs(position - index) > 1e3 * NODE_TOLERANCE) or np.any(index < 0) or np.any(index >= axis.n):
                raise DataFormatError("2-D observations must lie on the nodes of a regular grid")
            return index.astype(int)

        i, j = node_index(x[:, 0], axis1), node_index(x[:, 1], axis2)
        cells = i * axis2.n + j
        if np.unique(cells).size != cells.size:
            raise DataFormatError("Two observations share a grid cell")

        ext1 = np.zeros(axis1.n, dtype=bool)
        ext1[: axis1.n_ext] = ext1[axis1.n - axis1.n_ext :] = True
        ext2 = np.zeros(axis2.n, dtype=bool)
        ext2[: axis2.n_ext] = ext2[axis2.n - axis2.n_ext :] = True
        border = np.logical_or.outer(ext1, ext2).ravel()

        cell_rows = np.where(border, EXTENSION, MISSING)
        rows = np.arange(x.shape[0])
        cell_rows[cells[~missing]] = rows[~missing]
        return cls(axis1, axis2, cell_rows)

    @property
    def n1(self) -> int:
        return self.axis1.n

    @property
    def n2(self) -> int:
        return self.axis2.n

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    @property
    def observed(self) -> np.ndarray:
        return self.cell_rows >= 0

    @property
    def missing(self) -> np.ndarray:
        return self.cell_rows == MISSING

    @property
    def extension(self) -> np.ndarray:
        return self.cell_rows == EXTENSION

    @property
    def unobserved(self) -> np.ndarray:
        return self.cell_rows < 0

    def full_response(self, y) -> np.ndarray:
        """Responses placed on the complete grid, zero in unobserved cells."""
        y = np.asarray(y, dtype=float)
        out = np.zeros(self.size)
        observed = self.observed
        out[observed] = y[self.cell_rows[observed]]
        return out


def additive_design(grid: Grid2D):
    """(A1, A2): cell (i, j) picks node i of z1 and node j of z2."""
    A1 = sparse.kron(sparse.identity(grid.n1), np.ones((grid.n2, 1)), format="csr")
    A2 = sparse.kron(np.ones((grid.n1, 1)), sparse.identity(grid.n2), format="csr")
    return A1, A2


class AdditiveData:
    """Grid, working design and the SPDE configuration of each axis"""

    def __init__(self, grid: Grid2D, y, tau: float = 1.0, nu: float = 1.5):
        self.grid = grid
        self.y_observed = np.asarray(y, dtype=float)
        self.A1, self.A2 = additive_design(grid)
        start = grid.full_response(self.y_observed)
        self.obs = [LinearObservations(self.A1, start), LinearObservations(self.A2, start)]
        self.axis_cfg = [
            SpdeConfig(grid.n1, grid.axis1.h, grid.axis1.n_ext, tau, nu),
            SpdeConfig(grid.n2, grid.axis2.h, grid.axis2.n_ext, tau, nu),
        ]

    def cfg(self, component: int) -> SpdeConfig:
        """SPDE configuration of u1..u4 (0-based); u3 runs along x1, u4 along x2."""
        return self.axis_cfg[component % 2]

    def initial_log_sigma2(self) -> float:
        y = self.y_observed[self.grid.cell_rows[self.grid.observed]]
        if y.size < 2:
            return math.log(1e-8)
        return math.log(max(float(np.var(np.diff(y))) / 2.0, 1e-8))


@dataclass
class AdditiveState:
    """
    Chain state of the additive model. Lists hold components 1..4 at index 0..3;
    the interaction entries are None when the model has no z3.

    After every sweep z1 and z2 have zero mean and ``intercept`` holds the
    constant they shared, so the fitted surface is ``surface()``.
    """

    z1: np.ndarray
    z2: np.ndarray
    z3: Optional[np.ndarray]
    u: List[Optional[np.ndarray]]
    zeta: List[Optional[np.ndarray]]
    log_lambda: List[Optional[float]]
    log_sigma2: float
    y_full: np.ndarray
    adapt: Dict[str, AdaptiveScale] = field(default_factory=dict)
    iteration: int = 0
    intercept: float = 0.0

    @property
    def sigma2(self) -> float:
        return math.exp(self.log_sigma2)

    @property
    def has_interaction(self) -> bool:
        return self.z3 is not None

    def surface(self) -> np.ndarray:
        """A1 z1 + A2 z2 + z3 + intercept on the complete grid"""
        return additive_mean(self.z1, self.z2, self.z3) + self.intercept


def center_components(state: AdditiveState) -> AdditiveState:
    """
    @brief Move the means of z1 and z2 into the intercept
    @param state: Chain state (updated in place)
    @return AdditiveState: The same object; surface() is unchanged
    """
    m1, m2 = float(np.mean(state.z1)), float(np.mean(state.z2))
    state.z1 = state.z1 - m1
    state.z2 = state.z2 - m2
    state.intercept += m1 + m2
    return state


def additive_mean(z1, z2, z3=None) -> np.ndarray:
    """A1 z1 + A2 z2 + z3 on the complete grid"""
    mean = np.add.outer(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float)).ravel()
    return mean if z3 is None else mean + z3


def interaction_eigen(u3, u4, cfg3: SpdeConfig, cfg4: SpdeConfig) -> KroneckerEigen:
    return KroneckerEigen.from_precisions(precision(u3, cfg3), precision(u4, cfg4))


def z3_posterior_draw(eig: KroneckerEigen, sigma2: float, resid, noise) -> np.ndarray:
    """
    @brief Draw z3 ~ N(mu, (Q3 kron Q4 + sigma^-2 I)^-1) with mu = sigma^-2 Sigma resid
    @param eig: Eigendecompositions of Q3 and Q4
    @param sigma2: Noise variance
    @param resid: y - A1 z1 - A2 z2 on the complete grid
    @param noise: Standard normal vector (zeros give the mean)
    @return np.ndarray: z3
    """
    if not sigma2 > 0:
        raise NotPositiveDefinite(f"Noise variance must be positive, got {sigma2}")
    resid = np.asarray(resid, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if resid.shape != (eig.n1 * eig.n2,) or noise.shape != resid.shape:
        raise DimensionMismatch(f"Expected vectors of length {eig.n1 * eig.n2}")
    d = eig.eigenvalues() + 1.0 / sigma2
    alpha = eig.rotate(resid) / (sigma2 * d) + noise / np.sqrt(d)
    return eig.unrotate(alpha)


def z3_prior_draw(eig: KroneckerEigen, noise) -> np.ndarray:
    return eig.unrotate(np.asarray(noise, dtype=float) / np.sqrt(eig.eigenvalues()))


def block_marginal_loglik_1d(
    u_r,
    sigma2: float,
    A_r,
    resid,
    cfg: SpdeConfig,
    det_path: DeterminantPath = DeterminantPath.BANDED,
) -> float:
    """
    @brief log N(resid | 0, A_r Q_ur^-1 A_r^T + sigma2 I) for one first-order block
    @param A_r: Operator (a LinearObservations is reused with the new response)
    """
    obs = A_r.with_response(resid) if isinstance(A_r, LinearObservations) else LinearObservations(A_r, resid)
    return marginal_loglik(u_r, sigma2, obs, None, cfg, det_path)


def block_marginal_loglik_interaction(eig: KroneckerEigen, sigma2: float, resid) -> float:
    """
    @brief log N(resid | 0, (Q3 kron Q4)^-1 + sigma2 I) in the joint eigenbasis
    @param eig: Eigendecompositions of Q3 and Q4
    @param sigma2: Noise variance
    @param resid: y - A1 z1 - A2 z2 on the complete grid
    @return float: Marginal log-likelihood of the interaction block
    """
    if not sigma2 > 0:
        raise NotPositiveDefinite(f"Noise variance must be positive, got {sigma2}")
    resid = np.asarray(resid, dtype=float)
    if resid.shape != (eig.n1 * eig.n2,):
        raise DimensionMismatch(f"Residual length {resid.shape} != ({eig.n1 * eig.n2},)")
    variances = 1.0 / eig.eigenvalues() + sigma2
    rotated = eig.rotate(resid)
    return float(
        -0.5 * resid.size * LOG_2PI
        - 0.5 * np.sum(np.log(variances))
        - 0.5 * np.sum(rotated**2 / variances)
    )


def impute_missing(
    state: AdditiveState, grid: Grid2D, sigma2: float, rng: np.random.Generator
) -> AdditiveState:
    """
    @brief Redraw every unobserved cell from N(additive mean, sigma2)
    @param state: Chain state (y_full updated in place)
    @param grid: Complete grid
    @param sigma2: Noise variance
    @param rng: Random generator
    @return AdditiveState: The same object
    """
    cells = np.flatnonzero(grid.unobserved)
    if cells.size == 0:
        return state
    mean = state.surface()[cells]
    state.y_full[cells] = mean + math.sqrt(sigma2) * rng.standard_normal(cells.size)
    return state


__all__ = [
    "MISSING",
    "EXTENSION",
    "Grid2D",
    "AdditiveData",
    "AdditiveState",
    "center_components",
    "additive_design",
    "additive_mean",
    "interaction_eigen",
    "z3_posterior_draw",
    "z3_prior_draw",
    "block_marginal_loglik_1d",
    "block_marginal_loglik_interaction",
    "impute_missing",
]
