import math

import numpy as np
import pytest

from core.exceptions import NonFiniteLogPost
from samplers import AdaptiveScale, SiteScales, adaptive_rw_step, ess_slice_step


def test_scale_grows_after_an_accepting_batch_and_shrinks_otherwise():
    up = AdaptiveScale(scale=1.0, batch_size=5)
    for _ in range(5):
        up.record(True)
    assert up.scale == pytest.approx(math.exp(0.05))
    assert up.batches == 1

    down = AdaptiveScale(scale=1.0, batch_size=5)
    for _ in range(5):
        down.record(False)
    assert down.scale == pytest.approx(math.exp(-0.05))


def test_scale_is_clipped_and_frozen():
    state = AdaptiveScale(scale=1e3, batch_size=1)
    state.record(True)
    assert state.scale == 1e3
    state.freeze()
    state.record(False)
    assert state.scale == 1e3
    assert state.acceptance_rate == pytest.approx(0.5)


def test_site_scales_adapt_per_site():
    sites = SiteScales(3, scale=0.1, batch_size=2)
    sites.record_sweep([True, False, True])
    sites.record_sweep([True, False, False])
    np.testing.assert_allclose(sites.scales, 0.1 * np.exp([0.05, -0.05, 0.05]))
    assert sites.decisions == 6
    np.testing.assert_array_equal(sites.total_accepted, [2, 0, 1])


def test_rw_step_rejects_impossible_proposals():
    rng = np.random.default_rng(0)
    state = AdaptiveScale(scale=0.5)
    result = adaptive_rw_step(lambda x: 0.0 if x == 1.0 else -np.inf, 1.0, state, rng)
    assert not result.accepted
    assert result.value == 1.0
    assert state.total_proposed == 1


def test_rw_step_requires_finite_current_value():
    with pytest.raises(NonFiniteLogPost):
        adaptive_rw_step(lambda x: -np.inf, 0.0, AdaptiveScale(), np.random.default_rng(0))


def test_rw_chain_targets_standard_normal():
    rng = np.random.default_rng(1)
    state = AdaptiveScale(scale=1.0)
    x, draws = 0.0, []
    for _ in range(20000):
        step = adaptive_rw_step(lambda v: -0.5 * v * v, x, state, rng)
        x = step.value
        draws.append(x)
    draws = np.array(draws[2000:])
    assert abs(draws.mean()) < 0.1
    assert draws.var() == pytest.approx(1.0, abs=0.12)
    assert 0.3 < state.acceptance_rate < 0.6


def test_slice_step_on_flat_likelihood_takes_first_proposal():
    v, nu = np.array([1.0, 0.0]), np.array([0.0, 2.0])
    result = ess_slice_step(lambda _: 0.0, v, np.random.default_rng(0), nu=nu, theta=math.pi / 2)
    assert result.evaluations == 1
    np.testing.assert_allclose(result.value, [0.0, 2.0], atol=1e-15)


def test_slice_step_collapses_to_current_state():
    v = np.array([0.3, -0.2])

    def loglik(x):
        return 0.0 if np.array_equal(x, v) else -np.inf

    result = ess_slice_step(loglik, v, np.random.default_rng(2))
    np.testing.assert_array_equal(result.value, v)
    assert result.loglik == 0.0
    assert result.evaluations > 1


def test_slice_step_requires_finite_current_state():
    with pytest.raises(NonFiniteLogPost):
        ess_slice_step(lambda _: np.nan, np.zeros(2), np.random.default_rng(0))


def test_slice_chain_targets_gaussian_posterior():
    # prior N(0, 1), likelihood N(y | v, 1): posterior N(y / 2, 1 / 2)
    y = 1.2
    rng = np.random.default_rng(3)
    v, draws = np.zeros(1), []
    for _ in range(20000):
        v = ess_slice_step(lambda w: -0.5 * float((y - w[0]) ** 2), v, rng).value
        draws.append(v[0])
    draws = np.array(draws[1000:])
    assert draws.mean() == pytest.approx(0.6, abs=0.05)
    assert draws.var() == pytest.approx(0.5, abs=0.06)
