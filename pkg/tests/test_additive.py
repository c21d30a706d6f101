import numpy as np
import pytest
from scipy.stats import kstest, multivariate_normal

from additive import (
    AdditiveData,
    Grid2D,
    additive_design,
    additive_mean,
    block_marginal_loglik_1d,
    block_marginal_loglik_interaction,
    block_mellss_iteration,
    center_components,
    impute_missing,
    interaction_eigen,
    run_additive_chain,
    z3_posterior_draw,
)
from additive.block_sampler import BlockMarginalSampler
from config.constants import defaults
from core.exceptions import ConfigError, DataFormatError, NotPositiveDefinite
from data.experiments import generate
from data.grid import extend_domain, make_grid
from diagnostics.metrics import ess
from field.spde import precision
from models.run_types import HyperpriorKind, ModelConfig, SamplerSettings

EXT = defaults.ADDITIVE_EXTENSION


@pytest.fixture(scope="module")
def dataset():
    return generate("additive2d", seed=3, n1=6, n2=5, missing_fraction=0.2)


@pytest.fixture(scope="module")
def data(dataset):
    grid = Grid2D.from_observations(dataset.x, dataset.grid, dataset.grid2, dataset.missing)
    return AdditiveData(grid, dataset.y)


def field_values(cfg, shift=0.0):
    return 0.2 * np.sin(np.arange(cfg.n) + shift)


def short_model(hyperprior=HyperpriorKind.AR1):
    return ModelConfig(
        hyperprior=hyperprior,
        sampler=SamplerSettings(iterations=20, burnin_fraction=0.5, thin=2, batch_size=5),
    )


def test_cell_map_marks_observed_missing_and_border(dataset, data):
    grid = data.grid
    assert (grid.n1, grid.n2) == (6 + 2 * EXT, 5 + 2 * EXT)
    assert grid.missing.sum() == dataset.missing.sum() == 6
    assert grid.observed.sum() == 24
    assert grid.extension.sum() == grid.size - 30
    # data row i * 5 + j sits in cell (EXT + i, EXT + j)
    for row in np.flatnonzero(~dataset.missing):
        i, j = divmod(int(row), 5)
        assert grid.cell_rows[(EXT + i) * grid.n2 + EXT + j] == row

    full = grid.full_response(dataset.y)
    assert np.all(full[grid.unobserved] == 0.0)
    np.testing.assert_allclose(full[grid.observed], dataset.y[grid.cell_rows[grid.observed]])


def test_cell_map_rejects_bad_layouts():
    axis = extend_domain(make_grid(0.0, 4.0, 5), 1)
    with pytest.raises(DataFormatError):
        Grid2D.from_observations(np.array([[0.5, 1.0]]), axis, axis)
    with pytest.raises(DataFormatError):
        Grid2D.from_observations(np.array([[1.0, 1.0], [1.0, 1.0]]), axis, axis)
    with pytest.raises(DataFormatError):
        Grid2D.from_observations(np.array([1.0, 2.0]), axis, axis)


def test_design_matches_additive_mean(data):
    rng = np.random.default_rng(0)
    z1, z2 = rng.standard_normal(data.grid.n1), rng.standard_normal(data.grid.n2)
    A1, A2 = additive_design(data.grid)
    np.testing.assert_allclose(A1 @ z1 + A2 @ z2, additive_mean(z1, z2))
    z3 = rng.standard_normal(data.grid.size)
    np.testing.assert_allclose(additive_mean(z1, z2, z3), A1 @ z1 + A2 @ z2 + z3)


def test_first_order_block_marginal_matches_dense(data):
    cfg = data.cfg(0)
    u = field_values(cfg)
    resid = np.random.default_rng(1).standard_normal(data.grid.size)
    A = data.A1.toarray()
    cov = A @ np.linalg.solve(precision(u, cfg).to_dense(), A.T) + 0.3 * np.eye(data.grid.size)
    expected = multivariate_normal(np.zeros(data.grid.size), cov).logpdf(resid)
    assert block_marginal_loglik_1d(u, 0.3, data.obs[0], resid, cfg) == pytest.approx(expected, rel=1e-8)


def test_interaction_marginal_and_mean_match_dense(data):
    cfg3, cfg4 = data.cfg(2), data.cfg(3)
    u3, u4 = field_values(cfg3), field_values(cfg4, shift=1.0)
    eig = interaction_eigen(u3, u4, cfg3, cfg4)
    Q = np.kron(precision(u3, cfg3).to_dense(), precision(u4, cfg4).to_dense())
    resid = np.random.default_rng(2).standard_normal(data.grid.size)
    sigma2 = 0.2

    cov = np.linalg.inv(Q) + sigma2 * np.eye(data.grid.size)
    expected = multivariate_normal(np.zeros(data.grid.size), cov).logpdf(resid)
    assert block_marginal_loglik_interaction(eig, sigma2, resid) == pytest.approx(expected, rel=1e-7)

    mean = np.linalg.solve(Q + np.eye(data.grid.size) / sigma2, resid / sigma2)
    draw = z3_posterior_draw(eig, sigma2, resid, np.zeros(data.grid.size))
    np.testing.assert_allclose(draw, mean, rtol=1e-7, atol=1e-9)

    with pytest.raises(NotPositiveDefinite):
        block_marginal_loglik_interaction(eig, 0.0, resid)


def test_imputation_touches_unobserved_cells_only(data):
    sampler = BlockMarginalSampler(data, short_model(), np.random.default_rng(4))
    state = sampler.initial_state()
    state.z1 = np.linspace(-1.0, 1.0, data.grid.n1)
    state.z2 = np.linspace(0.0, 2.0, data.grid.n2)
    before = state.y_full.copy()
    impute_missing(state, data.grid, 1e-12, np.random.default_rng(5))
    observed = data.grid.observed
    np.testing.assert_array_equal(state.y_full[observed], before[observed])
    expected = additive_mean(state.z1, state.z2)[~observed]
    np.testing.assert_allclose(state.y_full[~observed], expected, atol=1e-4)


def test_centering_moves_means_into_intercept(data):
    rng = np.random.default_rng(10)
    sampler = BlockMarginalSampler(data, short_model(), rng, interaction=True)
    state = sampler.initial_state()
    state.z1 = np.linspace(1.0, 3.0, data.grid.n1)
    state.z2 = np.linspace(-1.0, 0.5, data.grid.n2)
    state.z3 = rng.standard_normal(data.grid.size)
    state.intercept = 0.25
    before = state.surface()

    center_components(state)
    assert np.mean(state.z1) == pytest.approx(0.0, abs=1e-12)
    assert np.mean(state.z2) == pytest.approx(0.0, abs=1e-12)
    assert state.intercept == pytest.approx(0.25 + 2.0 - 0.25)
    np.testing.assert_allclose(state.surface(), before, atol=1e-12)
    # the interaction block sees the same residual as before centering
    np.testing.assert_allclose(sampler.block_residual(state, 2), state.y_full - before + state.z3, atol=1e-12)


@pytest.mark.parametrize("interaction", [False, True])
def test_every_sweep_ends_centered(data, interaction):
    sampler = BlockMarginalSampler(data, short_model(), np.random.default_rng(11), interaction=interaction)
    state = sampler.initial_state()
    state.z1 = state.z1 + 5.0
    for _ in range(3):
        sampler.iterate(state)
        assert np.mean(state.z1) == pytest.approx(0.0, abs=1e-12)
        assert np.mean(state.z2) == pytest.approx(0.0, abs=1e-12)
        assert np.isfinite(state.intercept)


def test_surface_draws_are_capped(data):
    trace = run_additive_chain(data, short_model(), seed=4, surface_draws=2)
    assert trace.n_samples == 5
    assert trace.surface_draws.shape == (2, data.grid.size)
    with pytest.raises(ConfigError):
        run_additive_chain(data, short_model(), seed=4, surface_draws=0)


def test_single_sweep_keeps_shapes(data):
    model = short_model()
    sampler = BlockMarginalSampler(data, model, np.random.default_rng(6), interaction=True)
    state = sampler.initial_state()
    block_mellss_iteration(state, data, model, np.random.default_rng(7))
    assert state.z1.shape == (data.grid.n1,)
    assert state.z2.shape == (data.grid.n2,)
    assert state.z3.shape == (data.grid.size,)
    assert all(np.all(np.isfinite(u)) for u in state.u)


@pytest.mark.parametrize("interaction", [False, True])
def test_additive_chain_records_centered_components(data, interaction):
    trace = run_additive_chain(data, short_model(), seed=1, interaction=interaction)
    assert trace.burnin == 10 and trace.n_samples == 5
    assert trace.z1.shape == (5, data.grid.n1)
    assert trace.z2.shape == (5, data.grid.n2)
    np.testing.assert_allclose(trace.z1.mean(axis=1), 0.0, atol=1e-10)
    np.testing.assert_allclose(trace.z2.mean(axis=1), 0.0, atol=1e-10)
    assert trace.surface_draws.shape == (5, data.grid.size)
    np.testing.assert_allclose(trace.surface_mean, trace.surface_draws.mean(axis=0), atol=1e-10)
    components = {0, 1, 2, 3} if interaction else {0, 1}
    assert set(trace.lam) == set(trace.u) == components
    if interaction:
        assert trace.z3_mean.shape == trace.z3_sd.shape == (data.grid.size,)
        assert np.all(trace.z3_sd >= 0)
    else:
        assert trace.z3_mean is None
        for k in range(trace.n_samples):
            expected = additive_mean(trace.z1[k], trace.z2[k]) + trace.intercept[k]
            np.testing.assert_allclose(trace.surface_draws[k], expected, atol=1e-12)
    assert np.all(trace.sigma2 > 0)


def test_additive_chain_is_deterministic(data):
    first = run_additive_chain(data, short_model(), seed=9, interaction=True)
    second = run_additive_chain(data, short_model(), seed=9, interaction=True)
    np.testing.assert_array_equal(first.z1, second.z1)
    np.testing.assert_array_equal(first.sigma2, second.sigma2)
    np.testing.assert_array_equal(first.z3_mean, second.z3_mean)


def test_stationary_additive_fields_are_constant(data):
    trace = run_additive_chain(data, short_model(HyperpriorKind.CONST), seed=2, interaction=True)
    for r, u in trace.u.items():
        np.testing.assert_allclose(u, np.log(trace.lam[r])[:, None] * np.ones((1, u.shape[1])), atol=1e-12)


@pytest.fixture(scope="module")
def complete_data():
    # no extension border and no missing cells, so nothing is imputed
    dataset = generate("additive2d", seed=5, n1=6, n2=6, missing_fraction=0.0)
    lo, hi = defaults.ADDITIVE_DOMAIN
    axis = make_grid(lo, hi, 6)
    grid = Grid2D.from_observations(dataset.x, axis, axis)
    assert not np.any(grid.unobserved)
    return AdditiveData(grid, dataset.y - dataset.y.mean())


@pytest.mark.slow
def test_frozen_fields_surface_matches_conjugate_posterior(complete_data):
    data = complete_data
    settings = SamplerSettings(update_lambda=False, update_sigma2=False, update_length_scales=False)
    sampler = BlockMarginalSampler(data, ModelConfig(sampler=settings), np.random.default_rng(21), interaction=True)
    state = sampler.initial_state()
    for r in sampler.components:
        state.zeta[r] = 0.9 * np.cos(0.7 * np.arange(data.cfg(r).n) + r)
        state.u[r] = sampler.field_of(r, state.zeta[r], state.log_lambda[r])

    grid = data.grid
    A1, A2 = additive_design(grid)
    D = np.hstack([A1.toarray(), A2.toarray(), np.eye(grid.size)])
    prior = np.zeros((D.shape[1], D.shape[1]))
    n1, n2 = grid.n1, grid.n2
    prior[:n1, :n1] = precision(state.u[0], data.cfg(0)).to_dense()
    prior[n1 : n1 + n2, n1 : n1 + n2] = precision(state.u[1], data.cfg(1)).to_dense()
    prior[n1 + n2 :, n1 + n2 :] = np.kron(
        precision(state.u[2], data.cfg(2)).to_dense(), precision(state.u[3], data.cfg(3)).to_dense()
    )
    y = grid.full_response(data.y_observed)
    P = prior + D.T @ D / state.sigma2
    exact = D @ np.linalg.solve(P, D.T @ y / state.sigma2)

    cells = [0, grid.size // 2, grid.size - 1]
    draws = []
    for t in range(25000):
        sampler.iterate(state)
        if t >= 5000:
            draws.append(state.surface()[cells])
    draws = np.array(draws)
    for j, cell in enumerate(cells):
        se = draws[:, j].std() / np.sqrt(ess(draws[:, j]))
        assert abs(draws[:, j].mean() - exact[cell]) < 3.0 * se


@pytest.mark.slow
def test_without_likelihood_additive_chain_samples_the_prior(complete_data):
    data = complete_data
    model = ModelConfig(sampler=SamplerSettings(use_likelihood=False))
    sampler = BlockMarginalSampler(data, model, np.random.default_rng(22))
    state = sampler.initial_state()
    mid = data.cfg(0).n // 2
    zeta, log_lambda, log_sigma2 = [], [], []
    for t in range(60000):
        if t == 5000:
            sampler.freeze(state)
        sampler.iterate(state)
        if t >= 5000 and t % 25 == 0:
            zeta.append(state.zeta[0][mid])
            log_lambda.append(state.log_lambda[0])
            log_sigma2.append(state.log_sigma2)

    lam_prior, sigma2_prior = model.log_lambda_prior, model.log_sigma2_prior
    assert kstest(zeta, "norm").pvalue > 1e-3
    assert kstest(log_lambda, "norm", args=(lam_prior.mean, np.sqrt(lam_prior.var))).pvalue > 1e-3
    assert kstest(log_sigma2, "norm", args=(sigma2_prior.mean, np.sqrt(sigma2_prior.var))).pvalue > 1e-3
