"""
field/covariance.py
Closed-form covariance functions used as oracles for the SPDE discretization.
"""

import numpy as np
from scipy.special import gamma, kv


def _matern_correlation(arg, nu: float) -> np.ndarray:
    arg = np.asarray(arg, dtype=float)
    out = np.ones_like(arg)
    positive = arg > 0
    a = arg[positive]
    out[positive] = 2.0 ** (1.0 - nu) / gamma(nu) * a**nu * kv(nu, a)
    return out


def stat_matern(r, lam: float, tau: float = 1.0, nu: float = 1.5):
    """
    Stationary Matérn covariance tau^2 2^(1-nu)/Gamma(nu) (r/lam)^nu K_nu(r/lam).

    At nu = 3/2 this equals tau^2 (1 + r/lam) exp(-r/lam).
    """
    value = tau**2 * _matern_correlation(np.asarray(r, dtype=float) / lam, nu)
    return value if value.ndim else float(value)


def se_cov(r, lam: float, tau: float = 1.0):
    """Squared exponential covariance tau^2 exp(-r^2 / (2 lam^2))."""
    value = tau**2 * np.exp(-np.asarray(r, dtype=float) ** 2 / (2.0 * lam**2))
    return value if np.ndim(value) else float(value)


def ns_matern(x_i: float, x_j: float, ell, tau: float = 1.0, nu: float = 1.5) -> float:
    """
    @brief Non-stationary Matérn covariance with scalar kernel values Sigma(x) = ell(x)
    @param x_i: First location
    @param x_j: Second location
    @param ell: Callable returning the (positive) kernel value at a location
    @param tau: Field magnitude
    @param nu: Smoothness
    @return float: tau^2 |S_i|^1/4 |S_j|^1/4 / |(S_i+S_j)/2|^1/2 R(2 sqrt(nu Q_ij))
    """
    s_i, s_j = float(ell(x_i)), float(ell(x_j))
    if s_i <= 0 or s_j <= 0:
        raise ValueError(f"Kernel values must be positive, got {s_i}, {s_j}")
    mean_kernel = (s_i + s_j) / 2.0
    prefactor = s_i**0.25 * s_j**0.25 / mean_kernel**0.5
    q_ij = (x_i - x_j) ** 2 / mean_kernel
    return tau**2 * prefactor * float(_matern_correlation(2.0 * np.sqrt(nu * q_ij), nu))


def matern_kernel_scale(lam: float, nu: float = 1.5) -> float:
    """Kernel value Sigma for which ns_matern equals stat_matern with length-scale lam."""
    return 4.0 * nu * lam**2


__all__ = ["stat_matern", "se_cov", "ns_matern", "matern_kernel_scale"]
