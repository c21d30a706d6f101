"""
data/experiments.py
Synthetic benchmark data: a piecewise signal with smooth parts and edges, a
damped sine wave, the bumps signal and an additive 2-D surface.

All generators are deterministic given the seed and keep the noiseless truth
at the observation locations (and at the grid nodes) for scoring.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from config.constants import defaults
from core.exceptions import InvalidRange
from data.grid import Grid1D, extend_domain, make_grid, standardize

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Dataset:
    """Observations with their noiseless truth and the suggested latent grid(s)"""

    name: str
    x: np.ndarray  # (m,) in 1-D, (m, 2) in 2-D
    y: np.ndarray
    truth: Optional[np.ndarray] = None
    noise_var: Optional[float] = None
    grid: Optional[Grid1D] = None
    grid2: Optional[Grid1D] = None
    truth_grid: Optional[np.ndarray] = None
    missing: Optional[np.ndarray] = None
    y_mean: float = 0.0
    y_scale: float = 1.0

    def __post_init__(self):
        if self.x.shape[0] != self.y.shape[0]:
            raise InvalidRange(f"{self.x.shape[0]} locations but {self.y.shape[0]} responses")

    @property
    def m(self) -> int:
        return self.y.shape[0]

    @property
    def is_2d(self) -> bool:
        return self.x.ndim == 2


# ===== TRUTH FUNCTIONS =====


def experiment1_truth(x) -> np.ndarray:
    """exp(4 - 25 / (x (5 - x))) on (0, 5), 1 on [7, 8], -1 on (8, 9], 0 elsewhere"""
    x = np.asarray(x, dtype=float)
    bump = (x > 0) & (x < 5)
    denom = np.where(bump, x * (5.0 - x), 1.0)
    out = np.where(bump, np.exp(4.0 - 25.0 / denom), 0.0)
    out = np.where((x >= 7) & (x <= 8), 1.0, out)
    return np.where((x > 8) & (x <= 9), -1.0, out)


def damped_sine_truth(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.exp(-x) * np.cos(2.0 * np.pi * x)


def bumps_raw(t) -> np.ndarray:
    """sum_j h_j (1 + |t - t_j| / w_j)^-4 over the canonical bumps triples"""
    t = np.asarray(t, dtype=float)
    centers = np.array(defaults.BUMPS_LOCATIONS)
    heights = np.array(defaults.BUMPS_HEIGHTS)
    widths = np.array(defaults.BUMPS_WIDTHS)
    scaled = np.abs(t[..., None] - centers) / widths
    return np.sum(heights * (1.0 + scaled) ** -4, axis=-1)


def additive_truth(x1, x2) -> np.ndarray:
    return experiment1_truth(x1) + experiment1_truth(x2)


# ===== GENERATORS =====


def _noisy(truth: np.ndarray, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    if not noise_var > 0:
        raise InvalidRange(f"Noise variance must be positive, got {noise_var}")
    return truth + np.sqrt(noise_var) * rng.standard_normal(truth.shape)


def _check_m(m: int) -> None:
    if m < 2:
        raise InvalidRange(f"Need at least 2 observations, got {m}")


def gen_experiment1(
    m: int = defaults.EXP1_M,
    noise_var: float = defaults.EXP1_NOISE_VAR,
    seed: int = 0,
    n: int = min(defaults.EXP1_GRIDS),
) -> Dataset:
    """
    @brief Piecewise signal with a smooth bump and two steps on [0, 10]
    @param m: Number of equispaced observations
    @param noise_var: Noise variance
    @param seed: Random seed
    @param n: Grid size; 85, 169 and 253 use 2, 4 and 6 extension nodes per side
    @return Dataset: Observations on every (n - 2 n_ext - 1) / (m - 1)-th interior node
    """
    _check_m(m)
    rng = np.random.default_rng(seed)
    lo, hi = defaults.EXP1_DOMAIN
    x = np.linspace(lo, hi, m)
    truth = experiment1_truth(x)
    n_ext = defaults.EXP1_GRIDS.get(n, min(defaults.EXP1_GRIDS.values()))
    grid = extend_domain(make_grid(lo, hi, n - 2 * n_ext), n_ext)
    return Dataset(
        name="exp1",
        x=x,
        y=_noisy(truth, noise_var, rng),
        truth=truth,
        noise_var=noise_var,
        grid=grid,
        truth_grid=experiment1_truth(grid.nodes),
    )


def gen_damped_sine(
    m: int = defaults.DAMPED_SINE_M,
    noise_var: float = defaults.DAMPED_SINE_NOISE_VAR,
    seed: int = 0,
) -> Dataset:
    """exp(-x) cos(2 pi x) on [0, 8] with 40 extension nodes per side"""
    _check_m(m)
    rng = np.random.default_rng(seed)
    lo, hi = defaults.DAMPED_SINE_DOMAIN
    x = np.linspace(lo, hi, m)
    truth = damped_sine_truth(x)
    grid = extend_domain(make_grid(lo, hi, m), defaults.DAMPED_SINE_EXTENSION)
    return Dataset(
        name="damped_sine",
        x=x,
        y=_noisy(truth, noise_var, rng),
        truth=truth,
        noise_var=noise_var,
        grid=grid,
        truth_grid=damped_sine_truth(grid.nodes),
    )


def gen_bumps(m: int = defaults.BUMPS_M, snr: float = defaults.BUMPS_SNR, seed: int = 0) -> Dataset:
    """
    @brief Bumps signal on [0, 1], standardized, plus noise of standard deviation 1 / snr
    @param m: Number of equispaced observations
    @param snr: Signal-to-noise ratio of the standardized signal
    @param seed: Random seed
    @return Dataset: Truth is the standardized signal; grid truth uses the same mean and scale
    """
    _check_m(m)
    if not snr > 0:
        raise InvalidRange(f"Signal-to-noise ratio must be positive, got {snr}")
    rng = np.random.default_rng(seed)
    lo, hi = defaults.BUMPS_DOMAIN
    x = np.linspace(lo, hi, m)
    raw = bumps_raw(x)
    truth, mean, scale = standardize(raw)
    noise_var = 1.0 / snr**2
    grid = extend_domain(make_grid(lo, hi, m), defaults.BUMPS_EXTENSION)
    return Dataset(
        name="bumps",
        x=x,
        y=_noisy(truth, noise_var, rng),
        truth=truth,
        noise_var=noise_var,
        grid=grid,
        truth_grid=(bumps_raw(grid.nodes) - mean) / scale,
    )


def gen_additive_2d(
    n1: int = defaults.ADDITIVE_N,
    n2: Optional[int] = None,
    noise_var: float = defaults.ADDITIVE_NOISE_VAR,
    seed: int = 0,
    missing_fraction: float = 0.0,
) -> Dataset:
    """
    @brief z(x1, x2) = f(x1) + f(x2) on an n1 x n2 grid over [0, 10]^2, f the first benchmark signal
    @param n1: Cells along x1
    @param n2: Cells along x2 (defaults to n1)
    @param noise_var: Noise variance
    @param seed: Random seed
    @param missing_fraction: Fraction of cells flagged missing at random
    @return Dataset: Rows in x1-major order (cell (i, j) is row i * n2 + j)
    """
    n2 = n1 if n2 is None else n2
    _check_m(n1)
    _check_m(n2)
    if not 0.0 <= missing_fraction < 1.0:
        raise InvalidRange(f"Missing fraction must lie in [0, 1), got {missing_fraction}")
    rng = np.random.default_rng(seed)
    lo, hi = defaults.ADDITIVE_DOMAIN
    axis1, axis2 = np.linspace(lo, hi, n1), np.linspace(lo, hi, n2)
    x1, x2 = np.meshgrid(axis1, axis2, indexing="ij")
    x = np.column_stack([x1.ravel(), x2.ravel()])
    truth = additive_truth(x[:, 0], x[:, 1])
    y = _noisy(truth, noise_var, rng)

    missing = np.zeros(truth.shape[0], dtype=bool)
    n_missing = int(round(missing_fraction * truth.shape[0]))
    if n_missing:
        missing[rng.choice(truth.shape[0], size=n_missing, replace=False)] = True
        logger.debug(f"Flagged {n_missing} of {truth.shape[0]} cells as missing")

    ext = defaults.ADDITIVE_EXTENSION
    return Dataset(
        name="additive2d",
        x=x,
        y=y,
        truth=truth,
        noise_var=noise_var,
        grid=extend_domain(make_grid(lo, hi, n1), ext),
        grid2=extend_domain(make_grid(lo, hi, n2), ext),
        missing=missing,
    )


GENERATORS: Dict[str, Callable[..., Dataset]] = {
    "exp1": gen_experiment1,
    "damped_sine": gen_damped_sine,
    "bumps": gen_bumps,
    "additive2d": gen_additive_2d,
}


def generate(name: str, seed: int = 0, **overrides) -> Dataset:
    """
    @brief Generate a named benchmark data set
    @param name: One of defaults.EXPERIMENTS
    @param seed: Random seed
    @param overrides: Generator keyword arguments (None values are ignored)
    @return Dataset
    """
    if name not in GENERATORS:
        raise InvalidRange(f"Unknown experiment: {name}")
    kwargs = {k: v for k, v in overrides.items() if v is not None}
    dataset = GENERATORS[name](seed=seed, **kwargs)
    logger.info(f"Generated {name}: m={dataset.m}, noise variance={dataset.noise_var}")
    return dataset


__all__ = [
    "Dataset",
    "experiment1_truth",
    "damped_sine_truth",
    "bumps_raw",
    "additive_truth",
    "gen_experiment1",
    "gen_damped_sine",
    "gen_bumps",
    "gen_additive_2d",
    "GENERATORS",
    "generate",
]
