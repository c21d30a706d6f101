"""
field/spde.py
Finite-difference discretization of the non-stationary Matérn SPDE on a 1-D grid.

Row j of the factor L(u) is s_j * [-r_j, 1 + 2 r_j, -r_j] with r_j = l_j^2 / h^2 and
s_j = sqrt(h) / (tau * c_w * sqrt(l_j)); the first and last rows drop the
neighbour that falls outside the grid. The precision is Q_u = L(u)^T L(u).
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.special import gamma

from config.constants import defaults
from core.exceptions import DimensionMismatch, InvalidRange, MultiSiteDiff
from linalg.banded import BandedMatrix, logdet_tridiagonal, normal_form

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SpdeConfig:
    """Grid and field constants of the 1-D SPDE discretization"""

    n: int
    h: float
    n_ext: int = 0
    tau: float = defaults.FIELD_TAU
    nu: float = defaults.FIELD_NU

    def __post_init__(self):
        if self.n < 5:
            raise InvalidRange(f"Grid needs at least 5 nodes, got {self.n}")
        if not self.h > 0:
            raise InvalidRange(f"Grid step must be positive, got {self.h}")
        if self.n_ext < 0:
            raise InvalidRange(f"Extension size must be non-negative, got {self.n_ext}")
        if not self.tau > 0:
            raise InvalidRange(f"tau must be positive, got {self.tau}")
        if self.nu != 1.5:
            raise InvalidRange(f"Only nu = 3/2 is discretized in 1-D, got {self.nu}")

    @property
    def c_w(self) -> float:
        """White-noise normalizer sqrt(Var(w)) for d = 1"""
        d = 1
        return math.sqrt(gamma(self.nu + d / 2) * (4 * math.pi) ** (d / 2) / gamma(self.nu))


@dataclass(frozen=True, eq=False)
class LengthScaleField:
    """Log length-scales u on the grid with their prior location and magnitude"""

    u: np.ndarray
    mu_ell: float = defaults.MU_ELL
    tau_ell: float = defaults.TAU_ELL
    h: float = 1.0

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.ndim != 1 or not np.all(np.isfinite(u)):
            raise InvalidRange("Log length-scales must be a finite vector")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def ell(self) -> np.ndarray:
        return np.exp(self.u)

    def __len__(self) -> int:
        return self.u.shape[0]


LogScales = Union[LengthScaleField, np.ndarray]


def _log_scales(u: LogScales) -> np.ndarray:
    values = np.asarray(u.u if isinstance(u, LengthScaleField) else u, dtype=float)
    if values.ndim != 1 or not np.all(np.isfinite(values)):
        raise InvalidRange("Log length-scales must be a finite vector")
    return values


def stencil(u: np.ndarray, cfg: SpdeConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal entries and neighbour weights (s_j (1 + 2 r_j), s_j r_j) of L(u)."""
    ell = np.exp(u)
    ratio = ell**2 / cfg.h**2
    scale = math.sqrt(cfg.h) / (cfg.tau * cfg.c_w * np.sqrt(ell))
    return scale * (1.0 + 2.0 * ratio), scale * ratio


def build_L(u: LogScales, cfg: SpdeConfig) -> BandedMatrix:
    """
    @brief Tridiagonal SPDE factor L(u)
    @param u: Log length-scales on the grid (length cfg.n)
    @param cfg: Grid configuration
    @return BandedMatrix: n x n tridiagonal factor with corner truncation
    @raises DimensionMismatch: If len(u) != cfg.n
    """
    values = _log_scales(u)
    if values.shape[0] != cfg.n:
        raise DimensionMismatch(f"Length-scale field has {values.shape[0]} nodes, grid has {cfg.n}")
    diag, weight = stencil(values, cfg)
    bands = np.zeros((3, cfg.n))
    bands[0, 1:] = -weight[:-1]
    bands[1] = diag
    bands[2, :-1] = -weight[1:]
    return BandedMatrix(cfg.n, 1, 1, bands)


def precision(u: LogScales, cfg: SpdeConfig) -> BandedMatrix:
    """Pentadiagonal prior precision Q_u = L(u)^T L(u)."""
    return normal_form(build_L(u, cfg))


def field_logpdf(z, u: LogScales, cfg: SpdeConfig) -> float:
    """log N(z | 0, Q_u^-1)"""
    z = np.asarray(z, dtype=float)
    L = build_L(u, cfg)
    residual = L.matvec(z)
    logdet = logdet_tridiagonal(L.bands[2, :-1], L.bands[1], L.bands[0, 1:])
    return -0.5 * cfg.n * LOG_2PI + logdet - 0.5 * float(residual @ residual)


@dataclass(frozen=True)
class SiteProposal:
    """Candidate change of one row of L(u)"""

    k: int
    u_k: float
    diag: float
    weight: float
    logdet: float


class FieldFactor:
    """
    Row-wise mutable copy of L(u) for single-site updates of u.

    Changing u_k only changes row k of L(u), so the quadratic part of the
    prior log-ratio of z needs one row; log |det L| is refreshed with one
    tridiagonal LU.
    """

    def __init__(self, u: LogScales, cfg: SpdeConfig):
        values = _log_scales(u)
        if values.shape[0] != cfg.n:
            raise DimensionMismatch(f"Length-scale field has {values.shape[0]} nodes, grid has {cfg.n}")
        self.cfg = cfg
        self.u = values.copy()
        self.diag, self.weight = stencil(self.u, cfg)
        self.logdet = logdet_tridiagonal(-self.weight[1:], self.diag, -self.weight[:-1])

    def _row_product(self, k: int, diag: float, weight: float, z: np.ndarray) -> float:
        neighbours = (z[k - 1] if k > 0 else 0.0) + (z[k + 1] if k < self.cfg.n - 1 else 0.0)
        return diag * z[k] - weight * neighbours

    def site_logratio(self, k: int, u_k_new: float, z) -> Tuple[float, SiteProposal]:
        """
        @brief log N(z | 0, Q_{u*}^-1) - log N(z | 0, Q_u^-1) for u* = u with u_k replaced
        @return tuple: (log-ratio, proposal to pass to accept())
        """
        z = np.asarray(z, dtype=float)
        diag_new, weight_new = stencil(np.array([u_k_new], dtype=float), self.cfg)
        diag_new, weight_new = float(diag_new[0]), float(weight_new[0])

        sub, main, sup = -self.weight[1:], self.diag.copy(), -self.weight[:-1]
        main[k] = diag_new
        if k > 0:
            sub[k - 1] = -weight_new
        if k < self.cfg.n - 1:
            sup[k] = -weight_new
        logdet_new = logdet_tridiagonal(sub, main, sup)

        old_row = self._row_product(k, self.diag[k], self.weight[k], z)
        new_row = self._row_product(k, diag_new, weight_new, z)
        logratio = logdet_new - self.logdet - 0.5 * (new_row**2 - old_row**2)
        return logratio, SiteProposal(k, float(u_k_new), diag_new, weight_new, logdet_new)

    def accept(self, proposal: SiteProposal) -> None:
        k = proposal.k
        self.u[k] = proposal.u_k
        self.diag[k] = proposal.diag
        self.weight[k] = proposal.weight
        self.logdet = proposal.logdet


def logratio_prior_z(z, u_new: LogScales, u_old: LogScales, cfg: SpdeConfig) -> float:
    """
    @brief Prior log-ratio of z when u changes at a single site
    @param z: Latent field
    @param u_new: Proposed log length-scales
    @param u_old: Current log length-scales
    @param cfg: Grid configuration
    @return float: log N(z|0,Q_{u_new}^-1) - log N(z|0,Q_{u_old}^-1)
    @raises MultiSiteDiff: If the fields differ at more than one node
    """
    new, old = _log_scales(u_new), _log_scales(u_old)
    if new.shape != old.shape:
        raise DimensionMismatch(f"Fields of length {new.shape} and {old.shape}")
    changed = np.flatnonzero(new != old)
    if changed.size == 0:
        return 0.0
    if changed.size > 1:
        raise MultiSiteDiff(f"Fields differ at {changed.size} sites")
    k = int(changed[0])
    logratio, _ = FieldFactor(old, cfg).site_logratio(k, new[k], z)
    return logratio


__all__ = [
    "SpdeConfig",
    "LengthScaleField",
    "SiteProposal",
    "FieldFactor",
    "stencil",
    "build_L",
    "precision",
    "field_logpdf",
    "logratio_prior_z",
]
