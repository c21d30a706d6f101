"""
field/likelihood.py
Gaussian observations y = A z + eps: conditional latent draws and the marginal
likelihood with z integrated out, both through band matrices only.
"""

import math
from typing import Optional

import numpy as np
from scipy import sparse

from core.exceptions import DimensionMismatch, NotPositiveDefinite
from field.spde import LogScales, SpdeConfig, build_L
from linalg.banded import (
    BandedMatrix,
    banded_cholesky,
    cholesky_logdet,
    cholesky_solve,
    logdet_banded,
    normal_form,
    sample_from_precision,
)
from models.run_types import DeterminantPath

LOG_2PI = math.log(2.0 * math.pi)


class LinearObservations:
    """
    Sparse observation operator A (m x n) with responses y.

    A^T A, A^T y and y^T y are computed once; A^T A is kept in band storage,
    which requires each row of A to touch at most two adjacent nodes.
    """

    def __init__(self, A, y):
        self.A = sparse.csr_matrix(A, dtype=float)
        self.y = np.array(y, dtype=float)
        if self.y.ndim != 1 or self.y.shape[0] != self.A.shape[0]:
            raise DimensionMismatch(
                f"Operator has {self.A.shape[0]} rows but y has shape {self.y.shape}"
            )
        self.m, self.n = self.A.shape
        self.gram = BandedMatrix.from_sparse(self.A.T @ self.A, min(1, self.n - 1), min(1, self.n - 1))
        self.Aty = self.A.T @ self.y
        self.yty = float(self.y @ self.y)

    def with_response(self, y) -> "LinearObservations":
        """Same operator, new responses (A^T A is reused)."""
        clone = object.__new__(LinearObservations)
        clone.A, clone.m, clone.n, clone.gram = self.A, self.m, self.n, self.gram
        clone.y = np.array(y, dtype=float)
        if clone.y.shape != (self.m,):
            raise DimensionMismatch(f"Expected {self.m} responses, got {clone.y.shape}")
        clone.Aty = self.A.T @ clone.y
        clone.yty = float(clone.y @ clone.y)
        return clone

    def predict(self, z) -> np.ndarray:
        return self.A @ np.asarray(z, dtype=float)

    def residual_sum_of_squares(self, z) -> float:
        residual = self.y - self.predict(z)
        return float(residual @ residual)


def gaussian_loglik(rss: float, m: int, sigma2: float) -> float:
    """Sum of independent N(y_i | mean_i, sigma2) log-densities given the residual sum of squares."""
    return -0.5 * m * (LOG_2PI + math.log(sigma2)) - 0.5 * rss / sigma2


def posterior_precision(Q: BandedMatrix, sigma2: float, obs: LinearObservations) -> BandedMatrix:
    """Q + sigma^-2 A^T A"""
    if not sigma2 > 0:
        raise NotPositiveDefinite(f"Noise variance must be positive, got {sigma2}")
    if Q.n != obs.n:
        raise DimensionMismatch(f"Precision is {Q.n}x{Q.n} but A has {obs.n} columns")
    return Q + obs.gram.scaled(1.0 / sigma2)


def sample_latent_from_precision(Q: BandedMatrix, sigma2: float, obs: LinearObservations, noise):
    """Draw z ~ N(mu, (Q + sigma^-2 A^T A)^-1) with mu = Sigma sigma^-2 A^T y."""
    P = posterior_precision(Q, sigma2, obs)
    return sample_from_precision(P, obs.Aty / sigma2, noise)


def sample_latent(u: LogScales, sigma2: float, A, y, noise, cfg: SpdeConfig) -> np.ndarray:
    """
    @brief Conditional draw of the latent field given u, sigma2 and the data
    @param u: Log length-scales
    @param sigma2: Noise variance
    @param A: Observation operator (or a LinearObservations bundling A and y)
    @param y: Responses (ignored when A is a LinearObservations)
    @param noise: Standard normal vector of length n (zeros give the posterior mean)
    @param cfg: Grid configuration
    @return np.ndarray: z
    """
    obs = A if isinstance(A, LinearObservations) else LinearObservations(A, y)
    return sample_latent_from_precision(normal_form(build_L(u, cfg)), sigma2, obs, noise)


def marginal_loglik_from_precision(
    Q: BandedMatrix,
    sigma2: float,
    obs: LinearObservations,
    logdet_Q: Optional[float] = None,
    det_path: DeterminantPath = DeterminantPath.BANDED,
) -> float:
    """
    @brief log N(y | 0, A Q^-1 A^T + sigma2 I) without forming any m x m inverse
    @param Q: SPD band prior precision of z
    @param sigma2: Noise variance
    @param obs: Observations
    @param logdet_Q: log det Q if already known
    @param det_path: BANDED uses the determinant lemma; PROJECTED forms the m x m
        matrix I - sigma^-2 A (Q + sigma^-2 A^T A)^-1 A^T
    @return float: Marginal log-likelihood
    """
    P = posterior_precision(Q, sigma2, obs)
    R = banded_cholesky(P)
    rho = cholesky_solve(R, obs.Aty)
    quadratic = obs.yty / sigma2 - float(obs.Aty @ rho) / sigma2**2

    if det_path is DeterminantPath.PROJECTED:
        B = cholesky_solve(R, obs.A.T.toarray())
        inner = np.eye(obs.m) - (obs.A @ B) / sigma2
        sign, logdet_inner = np.linalg.slogdet(inner)
        if sign <= 0:
            raise NotPositiveDefinite("Projected marginal covariance is not positive definite")
        logdet_psi = obs.m * math.log(sigma2) - logdet_inner
    else:
        if logdet_Q is None:
            logdet_Q = logdet_banded(Q, assume_spd=True)
        logdet_psi = obs.m * math.log(sigma2) + cholesky_logdet(R) - logdet_Q

    return -0.5 * obs.m * LOG_2PI - 0.5 * logdet_psi - 0.5 * quadratic


def marginal_loglik(
    u: LogScales,
    sigma2: float,
    A,
    y,
    cfg: SpdeConfig,
    det_path: DeterminantPath = DeterminantPath.BANDED,
) -> float:
    """
    @brief Marginal likelihood of the data with the latent field integrated out
    @param u: Log length-scales
    @param sigma2: Noise variance
    @param A: Observation operator (or a LinearObservations bundling A and y)
    @param y: Responses (ignored when A is a LinearObservations)
    @param cfg: Grid configuration
    @return float: log N(y | 0, A Q_u^-1 A^T + sigma2 I)
    """
    obs = A if isinstance(A, LinearObservations) else LinearObservations(A, y)
    L = build_L(u, cfg)
    logdet_Q = 2.0 * logdet_banded(L)
    return marginal_loglik_from_precision(normal_form(L), sigma2, obs, logdet_Q, det_path)


__all__ = [
    "LinearObservations",
    "gaussian_loglik",
    "posterior_precision",
    "sample_latent",
    "sample_latent_from_precision",
    "marginal_loglik",
    "marginal_loglik_from_precision",
]
