"""
priors/hyperpriors.py
Gaussian hyperpriors on the log length-scale process u.

AR1: u - mu_ell has the sparse precision Q_phi = L(phi)^T L(phi) with the upper
bidiagonal L(phi) of an exponential (Ornstein-Uhlenbeck) covariance.
SE: squared exponential covariance with a dense Cholesky factor.
CONST: no process at all, u = log lambda at every node (stationary baseline).
"""

import logging
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from config.constants import defaults
from core.exceptions import (
    DimensionMismatch,
    InvalidRange,
    KindMismatch,
    NotPositiveDefinite,
    WrongKind,
)
from linalg.banded import BandedMatrix, normal_form, solve_banded
from models.run_types import HyperpriorKind

LOG_2PI = math.log(2.0 * math.pi)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HyperpriorSpec:
    """Hyperprior family and parameters on an n-node grid with step h"""

    kind: HyperpriorKind
    lam: float
    tau_ell: float
    mu_ell: float
    h: float
    n: int

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise InvalidRange(f"Hyper length-scale must be positive, got {self.lam}")
        if self.kind is not HyperpriorKind.CONST and not self.tau_ell > 0:
            raise InvalidRange(f"tau_ell must be positive, got {self.tau_ell}")
        if not self.h > 0:
            raise InvalidRange(f"Grid step must be positive, got {self.h}")
        if self.n < 1:
            raise InvalidRange(f"Grid size must be positive, got {self.n}")

    def with_lambda(self, lam: float) -> "HyperpriorSpec":
        return replace(self, lam=lam)

    @property
    def log_lambda(self) -> float:
        return math.log(self.lam)


def _require(spec: HyperpriorSpec, *kinds: HyperpriorKind) -> None:
    if spec.kind not in kinds:
        raise WrongKind(f"Operation not defined for {spec.kind.value} hyperprior")


def _as_vector(values, n: int) -> np.ndarray:
    vector = np.asarray(values, dtype=float)
    if vector.shape != (n,):
        raise DimensionMismatch(f"Expected a vector of length {n}, got shape {vector.shape}")
    return vector


# ===== AR(1) =====


def ar1_coefficients(spec: HyperpriorSpec) -> Tuple[float, float]:
    """(a0, a1) of the bidiagonal factor; a1 < 0 < a0 for all h, lambda > 0."""
    ratio = spec.h / spec.lam
    root = math.sqrt(ratio + 4.0 / ratio)
    norm = spec.tau_ell * math.sqrt(8.0)
    return (math.sqrt(ratio) + root) / norm, (math.sqrt(ratio) - root) / norm


def ar1_factor(spec: HyperpriorSpec) -> BandedMatrix:
    """
    @brief Upper bidiagonal L(phi) with diagonal (a0, ..., a0, 1) and superdiagonal a1
    @param spec: AR1 hyperprior
    @return BandedMatrix: n x n factor with p = 0, q = 1
    @raises WrongKind: If spec.kind is not AR1
    """
    _require(spec, HyperpriorKind.AR1)
    return _ar1_factor(spec)


@lru_cache(maxsize=64)
def _ar1_factor(spec: HyperpriorSpec) -> BandedMatrix:
    a0, a1 = ar1_coefficients(spec)
    n = spec.n
    if n == 1:
        return BandedMatrix(1, 0, 0, np.ones((1, 1)))
    bands = np.zeros((2, n))
    bands[0, 1:] = a1
    bands[1, :] = a0
    bands[1, -1] = 1.0
    return BandedMatrix(n, 0, 1, bands)


@lru_cache(maxsize=64)
def _ar1_precision(spec: HyperpriorSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Main diagonal and first off-diagonal of Q_phi."""
    Q = normal_form(_ar1_factor(spec))
    return Q.diagonal(0), Q.diagonal(1)


def ar1_beta(spec: HyperpriorSpec) -> float:
    """Implied lag-h autocorrelation -a1/a0, inside (0, 1)."""
    a0, a1 = ar1_coefficients(spec)
    return -a1 / a0


# ===== SQUARED EXPONENTIAL =====


class FactorCache:
    """Small LRU cache of SE Cholesky factors keyed by (lambda, tau_ell, grid)."""

    def __init__(self, max_size: int = defaults.SE_CACHE_SIZE):
        self._lock = threading.Lock()
        self._entries: "OrderedDict[tuple, dict]" = OrderedDict()
        self.max_size = max_size

    def get(self, key: tuple) -> Optional[dict]:
        with self._lock:
            entry = self._entries.get(key)
            if entry is not None:
                self._entries.move_to_end(key)
            return entry

    def put(self, key: tuple, entry: dict) -> dict:
        with self._lock:
            self._entries[key] = entry
            self._entries.move_to_end(key)
            while len(self._entries) > self.max_size:
                self._entries.popitem(last=False)
            return entry

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()


_se_cache = FactorCache()


def _grid(spec: HyperpriorSpec, grid) -> np.ndarray:
    if grid is None:
        return np.arange(spec.n) * spec.h
    return _as_vector(grid, spec.n)


def se_covariance(spec: HyperpriorSpec, grid=None) -> np.ndarray:
    """tau_ell^2 exp(-(x_i - x_j)^2 / (2 lambda^2)) without jitter."""
    x = _grid(spec, grid)
    diff = x[:, None] - x[None, :]
    return spec.tau_ell**2 * np.exp(-(diff**2) / (2.0 * spec.lam**2))


def _se_entry(spec: HyperpriorSpec, grid) -> dict:
    x = _grid(spec, grid)
    key = (spec.lam, spec.tau_ell, x.tobytes())
    entry = _se_cache.get(key)
    if entry is not None:
        return entry

    C = se_covariance(spec, x)
    steps = int(round(math.log10(defaults.SE_JITTER_MAX / defaults.SE_JITTER_START))) + 1
    for step in range(steps):
        jitter = defaults.SE_JITTER_START * 10.0**step * spec.tau_ell**2
        try:
            R = scipy.linalg.cholesky(C + jitter * np.eye(spec.n), lower=True)
        except np.linalg.LinAlgError:
            logger.debug(f"SE Cholesky failed with jitter {jitter:.1e}, escalating")
            continue
        R.setflags(write=False)
        return _se_cache.put(key, {"R": R, "jitter": jitter, "precision": None})
    raise NotPositiveDefinite(
        f"SE covariance not positive definite (lambda={spec.lam}) after maximum jitter"
    )


def se_chol(spec: HyperpriorSpec, grid=None) -> np.ndarray:
    """
    @brief Lower Cholesky factor of the jittered SE covariance
    @param spec: SE hyperprior
    @param grid: Node coordinates (defaults to j * h)
    @return np.ndarray: Read-only lower-triangular R with R R^T = C_phi + jitter I
    @raises NotPositiveDefinite: If the maximum jitter does not help
    """
    _require(spec, HyperpriorKind.SE)
    return _se_entry(spec, grid)["R"]


def _se_precision(spec: HyperpriorSpec) -> np.ndarray:
    entry = _se_entry(spec, None)
    if entry["precision"] is None:
        R_inv = scipy.linalg.solve_triangular(entry["R"], np.eye(spec.n), lower=True)
        entry["precision"] = R_inv.T @ R_inv
    return entry["precision"]


# ===== WHITENING =====


def unwhiten(spec: HyperpriorSpec, zeta) -> np.ndarray:
    """u = R_phi zeta + mu_ell; for AR1 this solves L(phi)(u - mu_ell) = zeta."""
    _require(spec, HyperpriorKind.AR1, HyperpriorKind.SE)
    zeta = _as_vector(zeta, spec.n)
    if spec.kind is HyperpriorKind.AR1:
        return solve_banded(_ar1_factor(spec), zeta) + spec.mu_ell
    return se_chol(spec) @ zeta + spec.mu_ell


def whiten(spec: HyperpriorSpec, u) -> np.ndarray:
    """Inverse of unwhiten."""
    _require(spec, HyperpriorKind.AR1, HyperpriorKind.SE)
    centered = _as_vector(u, spec.n) - spec.mu_ell
    if spec.kind is HyperpriorKind.AR1:
        return _ar1_factor(spec).matvec(centered)
    return scipy.linalg.solve_triangular(se_chol(spec), centered, lower=True)


# ===== DENSITIES =====


def logpdf_u(spec: HyperpriorSpec, u) -> float:
    """
    @brief Gaussian log-density of u under the hyperprior
    @param spec: AR1 or SE hyperprior
    @param u: Log length-scales
    @return float: log N(u | mu_ell, Q_phi^-1)
    """
    _require(spec, HyperpriorKind.AR1, HyperpriorKind.SE)
    centered = _as_vector(u, spec.n) - spec.mu_ell
    if spec.kind is HyperpriorKind.AR1:
        L = _ar1_factor(spec)
        residual = L.matvec(centered)
        logdet = float(np.sum(np.log(L.bands[L.q])))
        return -0.5 * spec.n * LOG_2PI + logdet - 0.5 * float(residual @ residual)
    R = se_chol(spec)
    white = scipy.linalg.solve_triangular(R, centered, lower=True)
    return (
        -0.5 * spec.n * LOG_2PI
        - float(np.sum(np.log(np.diag(R))))
        - 0.5 * float(white @ white)
    )


def logratio_u_site(spec: HyperpriorSpec, u, k: int, u_k_new: float) -> float:
    """
    @brief logpdf_u with u_k replaced minus logpdf_u, from row k of Q_phi only
    @param spec: AR1 or SE hyperprior
    @param u: Current log length-scales
    @param k: Site index
    @param u_k_new: Proposed value at site k
    @return float: Log prior ratio
    """
    _require(spec, HyperpriorKind.AR1, HyperpriorKind.SE)
    centered = _as_vector(u, spec.n) - spec.mu_ell
    if not 0 <= k < spec.n:
        raise InvalidRange(f"Site {k} outside grid of size {spec.n}")
    old, new = centered[k], u_k_new - spec.mu_ell
    if new == old:
        return 0.0

    if spec.kind is HyperpriorKind.AR1:
        main, off = _ar1_precision(spec)
        q_kk = main[k]
        cross = 0.0
        if k > 0:
            cross += off[k - 1] * centered[k - 1]
        if k < spec.n - 1:
            cross += off[k] * centered[k + 1]
    else:
        row = _se_precision(spec)[k]
        q_kk = row[k]
        cross = float(row @ centered) - q_kk * old

    return -0.5 * ((new**2 - old**2) * q_kk + 2.0 * (new - old) * cross)


def logratio_lambda(spec_new: HyperpriorSpec, spec_old: HyperpriorSpec, u) -> float:
    """
    @brief logpdf_u(spec_new, u) - logpdf_u(spec_old, u) for a change of lambda only
    @raises KindMismatch: If the specs differ in anything but lambda
    """
    if replace(spec_new, lam=spec_old.lam) != spec_old:
        raise KindMismatch("Hyperprior specs must differ only in lambda")
    if spec_new.lam == spec_old.lam:
        return 0.0
    return logpdf_u(spec_new, u) - logpdf_u(spec_old, u)


def clear_factor_cache() -> None:
    """Drop cached SE factors (e.g. between independent runs)."""
    _se_cache.clear()


__all__ = [
    "HyperpriorSpec",
    "ar1_coefficients",
    "ar1_factor",
    "ar1_beta",
    "se_covariance",
    "se_chol",
    "unwhiten",
    "whiten",
    "logpdf_u",
    "logratio_u_site",
    "logratio_lambda",
    "clear_factor_cache",
]
