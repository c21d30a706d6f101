"""
data/grid.py
Regular 1-D grids, domain extension and the sparse observation operator.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from config.constants import defaults
from core.exceptions import DimensionMismatch, InvalidRange, OutOfHull

# Relative distance (in steps) under which an observation sits on a node
NODE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Equispaced nodes lo + j h; the first and last ``n_ext`` nodes extend the data domain"""

    lo: float
    h: float
    n: int
    n_ext: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidRange(f"Grid needs at least 2 nodes, got {self.n}")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise InvalidRange(f"Grid step must be positive, got {self.h}")
        if not 0 <= 2 * self.n_ext < self.n:
            raise InvalidRange(f"{self.n_ext} extension nodes per side leave no interior")

    @property
    def nodes(self) -> np.ndarray:
        return self.lo + self.h * np.arange(self.n)

    @property
    def hi(self) -> float:
        return self.lo + self.h * (self.n - 1)

    @property
    def interior(self) -> slice:
        return slice(self.n_ext, self.n - self.n_ext)

    @property
    def n_interior(self) -> int:
        return self.n - 2 * self.n_ext


def make_grid(lo: float, hi: float, n: int) -> Grid1D:
    """n equispaced nodes on [lo, hi]"""
    if not hi > lo:
        raise InvalidRange(f"Empty domain [{lo}, {hi}]")
    if n < 2:
        raise InvalidRange(f"Grid needs at least 2 nodes, got {n}")
    return Grid1D(float(lo), (hi - lo) / (n - 1), n)


def extend_domain(grid: Grid1D, n_ext: int) -> Grid1D:
    """
    @brief Add n_ext nodes with the same step on each side
    @param grid: Grid to extend
    @param n_ext: Nodes per side (0 returns the grid unchanged)
    @return Grid1D: Grid with n + 2 n_ext nodes
    """
    if n_ext < 0:
        raise InvalidRange(f"Extension size must be non-negative, got {n_ext}")
    if n_ext == 0:
        return grid
    return Grid1D(grid.lo - n_ext * grid.h, grid.h, grid.n + 2 * n_ext, grid.n_ext + n_ext)


def default_extension(h: float, mu_ell: float = defaults.MU_ELL) -> int:
    """Nodes per side covering EXTENSION_LENGTH_SCALES prior length-scales"""
    return int(math.ceil(defaults.EXTENSION_LENGTH_SCALES * math.exp(mu_ell) / h))


def is_equispaced(x, rtol: float = 1e-6) -> bool:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return False
    steps = np.diff(x)
    return bool(steps[0] > 0 and np.allclose(steps, steps[0], rtol=rtol, atol=0.0))


def grid_for_observations(x, n: Optional[int] = None, n_ext: Optional[int] = None,
                          mu_ell: float = defaults.MU_ELL) -> Grid1D:
    """
    @brief Extended grid for a set of 1-D observation locations
    @param x: Observation locations
    @param n: Total node count including extension (defaults to one node per
        distinct location when they are equispaced)
    @param n_ext: Extension nodes per side (defaults to default_extension)
    @param mu_ell: Prior location of u, used by the default extension
    @return Grid1D: Extended grid whose interior spans [min x, max x]
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DimensionMismatch("Need at least two 1-D observation locations")
    distinct = np.unique(x)
    lo, hi = float(distinct[0]), float(distinct[-1])
    if n is None:
        if is_equispaced(distinct):
            interior = distinct.size
        else:
            interior = max(distinct.size, 5)
        if n_ext is None:
            n_ext = default_extension((hi - lo) / (interior - 1), mu_ell)
    else:
        if n_ext is None:
            raise InvalidRange("An explicit grid size needs an explicit extension size")
        interior = n - 2 * n_ext
    if interior < 2:
        raise InvalidRange(f"Grid of {n} nodes with {n_ext} per side has no interior")
    return extend_domain(make_grid(lo, hi, interior), n_ext)


def build_observation_operator(obs_x, grid: Grid1D) -> sparse.csr_matrix:
    """
    @brief Linear-interpolation operator from grid nodes to observation locations
    @param obs_x: Observation locations
    @param grid: Grid whose hull contains every location
    @return sparse.csr_matrix: m x n operator, rows sum to 1 with at most two
        adjacent nonzeros (a single 1 when a location sits on a node)
    @raises OutOfHull: If a location lies outside [grid.lo, grid.hi]
    """
    obs_x = np.asarray(obs_x, dtype=float)
    position = (obs_x - grid.lo) / grid.h
    tol = NODE_TOLERANCE
    outside = (position < -tol) | (position > grid.n - 1 + tol)
    if np.any(outside):
        raise OutOfHull(f"{int(outside.sum())} locations outside [{grid.lo}, {grid.hi}]")

    nearest = np.rint(position)
    on_node = np.abs(position - nearest) <= tol
    left = np.clip(np.floor(position), 0, grid.n - 2).astype(int)
    weight = np.clip(position - left, 0.0, 1.0)
    left = np.where(on_node, nearest.astype(int), left)

    m = obs_x.shape[0]
    rows = np.concatenate([np.arange(m), np.arange(m)[~on_node]])
    cols = np.concatenate([left, left[~on_node] + 1])
    vals = np.concatenate([np.where(on_node, 1.0, 1.0 - weight), weight[~on_node]])
    return sparse.csr_matrix((vals, (rows, cols)), shape=(m, grid.n))


def standardize(y) -> Tuple[np.ndarray, float, float]:
    """(y - mean) / sd with the n - 1 sample standard deviation; returns (scaled, mean, sd)."""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise InvalidRange("Standardization needs at least two values")
    mean = float(np.mean(y))
    scale = float(np.std(y, ddof=1))
    if not scale > 0:
        raise InvalidRange("Cannot standardize a constant response")
    return (y - mean) / scale, mean, scale


def unstandardize(values, mean: float, scale: float) -> np.ndarray:
    return np.asarray(values, dtype=float) * scale + mean


__all__ = [
    "Grid1D",
    "make_grid",
    "extend_domain",
    "default_extension",
    "is_equispaced",
    "grid_for_observations",
    "build_observation_operator",
    "standardize",
    "unstandardize",
]
