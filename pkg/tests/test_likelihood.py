import numpy as np
import pytest
from scipy import sparse
from scipy.stats import multivariate_normal

from core.exceptions import DimensionMismatch, NotPositiveDefinite
from data.grid import build_observation_operator, extend_domain, make_grid
from field import (
    LinearObservations,
    SpdeConfig,
    gaussian_loglik,
    marginal_loglik,
    marginal_loglik_from_precision,
    precision,
    sample_latent,
)
from linalg.banded import BandedMatrix
from models.run_types import DeterminantPath


@pytest.fixture
def problem():
    grid = extend_domain(make_grid(0.0, 2.0, 11), 3)
    cfg = SpdeConfig(grid.n, grid.h, grid.n_ext)
    x = np.array([0.0, 0.33, 0.8, 1.0, 1.45, 1.9, 2.0])
    A = build_observation_operator(x, grid)
    y = np.sin(3.0 * x) + 0.1
    u = 0.3 * np.cos(grid.nodes) - 1.0
    return cfg, A, y, u


def dense_marginal(cfg, A, y, u, sigma2):
    Q = precision(u, cfg).to_dense()
    Ad = A.toarray()
    cov = Ad @ np.linalg.solve(Q, Ad.T) + sigma2 * np.eye(len(y))
    return multivariate_normal(np.zeros(len(y)), cov).logpdf(y)


@pytest.mark.parametrize("sigma2", [1e-3, 0.05, 2.0])
def test_marginal_loglik_matches_dense(problem, sigma2):
    cfg, A, y, u = problem
    expected = dense_marginal(cfg, A, y, u, sigma2)
    assert marginal_loglik(u, sigma2, A, y, cfg) == pytest.approx(expected, rel=1e-8)


def test_projected_and_banded_paths_agree(problem):
    cfg, A, y, u = problem
    banded = marginal_loglik(u, 0.1, A, y, cfg, DeterminantPath.BANDED)
    projected = marginal_loglik(u, 0.1, A, y, cfg, DeterminantPath.PROJECTED)
    assert projected == pytest.approx(banded, rel=1e-9)


def test_sample_latent_zero_noise_is_posterior_mean(problem):
    cfg, A, y, u = problem
    sigma2 = 0.05
    Q = precision(u, cfg).to_dense()
    Ad = A.toarray()
    mean = np.linalg.solve(Q + Ad.T @ Ad / sigma2, Ad.T @ y / sigma2)
    draw = sample_latent(u, sigma2, A, y, np.zeros(cfg.n), cfg)
    np.testing.assert_allclose(draw, mean, rtol=1e-9, atol=1e-12)


def test_sample_latent_accepts_bundled_observations(problem):
    cfg, A, y, u = problem
    obs = LinearObservations(A, y)
    noise = np.random.default_rng(3).standard_normal(cfg.n)
    np.testing.assert_allclose(
        sample_latent(u, 0.2, obs, None, noise, cfg),
        sample_latent(u, 0.2, A, y, noise, cfg),
    )


def test_observations_cache_gram_and_swap_response(problem):
    _, A, y, _ = problem
    obs = LinearObservations(A, y)
    np.testing.assert_allclose(obs.gram.to_dense(), (A.T @ A).toarray())
    swapped = obs.with_response(2.0 * y)
    assert swapped.gram is obs.gram
    np.testing.assert_allclose(swapped.Aty, 2.0 * obs.Aty)
    assert swapped.yty == pytest.approx(4.0 * obs.yty)
    with pytest.raises(DimensionMismatch):
        obs.with_response(y[:-1])
    with pytest.raises(DimensionMismatch):
        LinearObservations(A, y[:-1])


def test_non_positive_noise_variance_rejected(problem):
    cfg, A, y, u = problem
    with pytest.raises(NotPositiveDefinite):
        marginal_loglik(u, 0.0, A, y, cfg)


def test_gaussian_loglik_independent_normals():
    residual = np.array([0.5, -1.0, 0.25])
    expected = np.sum(multivariate_normal(np.zeros(3), 0.3 * np.eye(3)).logpdf(residual))
    assert gaussian_loglik(float(residual @ residual), 3, 0.3) == pytest.approx(expected)


def test_marginal_loglik_ignores_observation_order(problem):
    cfg, A, y, u = problem
    perm = np.random.default_rng(7).permutation(len(y))
    original = marginal_loglik(u, 0.05, A, y, cfg)
    assert marginal_loglik(u, 0.05, A[perm], y[perm], cfg) == pytest.approx(original, rel=1e-10)


@pytest.mark.parametrize("det_path", list(DeterminantPath))
def test_single_node_single_observation(det_path):
    obs = LinearObservations(sparse.csr_matrix([[1.0]]), np.array([0.0]))
    value = marginal_loglik_from_precision(BandedMatrix.identity(1), 1.0, obs, det_path=det_path)
    assert value == pytest.approx(-0.5 * np.log(2.0 * np.pi) - 0.5 * np.log(2.0))
    assert value == pytest.approx(-1.265512, abs=1e-6)
