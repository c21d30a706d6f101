import numpy as np
import pytest

from config.constants import defaults
from core.exceptions import InvalidRange
from data.experiments import (
    additive_truth,
    bumps_raw,
    damped_sine_truth,
    experiment1_truth,
    generate,
)


def test_experiment1_truth_pieces():
    x = np.array([0.0, 2.5, 5.0, 6.0, 7.0, 8.0, 8.5, 9.0, 9.5])
    expected = [0.0, np.exp(4.0 - 25.0 / 6.25), 0.0, 0.0, 1.0, 1.0, -1.0, -1.0, 0.0]
    np.testing.assert_allclose(experiment1_truth(x), expected)
    assert experiment1_truth(np.array([2.5]))[0] == pytest.approx(1.0)


def test_other_truth_functions():
    assert damped_sine_truth(np.array([0.0]))[0] == pytest.approx(1.0)
    assert damped_sine_truth(np.array([1.0]))[0] == pytest.approx(np.exp(-1.0))
    # each bump peaks at its own height plus the tails of the others
    peak = bumps_raw(np.array([defaults.BUMPS_LOCATIONS[0]]))[0]
    assert peak >= defaults.BUMPS_HEIGHTS[0]
    np.testing.assert_allclose(additive_truth(np.array([7.5]), np.array([8.5])), [0.0])


@pytest.mark.parametrize("grid_n,n_ext", sorted(defaults.EXP1_GRIDS.items()))
def test_experiment1_grids_place_observations_on_nodes(grid_n, n_ext):
    dataset = generate("exp1", seed=0, n=grid_n)
    grid = dataset.grid
    assert grid.n == grid_n and grid.n_ext == n_ext
    interior = grid.nodes[grid.interior]
    stride = (grid.n_interior - 1) // (dataset.m - 1)
    np.testing.assert_allclose(interior[::stride], dataset.x, atol=1e-12)
    np.testing.assert_allclose(dataset.truth_grid, experiment1_truth(grid.nodes))


def test_damped_sine_and_bumps_defaults():
    sine = generate("damped_sine", seed=1)
    assert sine.m == defaults.DAMPED_SINE_M
    assert sine.grid.n_ext == defaults.DAMPED_SINE_EXTENSION

    bumps = generate("bumps", seed=1)
    assert bumps.m == defaults.BUMPS_M
    assert bumps.noise_var == pytest.approx(1.0 / defaults.BUMPS_SNR**2)
    assert np.mean(bumps.truth) == pytest.approx(0.0, abs=1e-12)
    assert np.std(bumps.truth, ddof=1) == pytest.approx(1.0)
    np.testing.assert_allclose(bumps.truth_grid[bumps.grid.interior], bumps.truth, atol=1e-9)


def test_generators_are_seeded():
    first, second = generate("damped_sine", seed=5, m=40), generate("damped_sine", seed=5, m=40)
    np.testing.assert_array_equal(first.y, second.y)
    assert not np.array_equal(first.y, generate("damped_sine", seed=6, m=40).y)


def test_additive_layout_and_missing_cells():
    dataset = generate("additive2d", seed=2, n1=6, n2=4, missing_fraction=0.25)
    assert dataset.is_2d and dataset.m == 24
    # row i * n2 + j holds cell (i, j)
    assert dataset.x[4 * 1 + 2, 0] == pytest.approx(2.0)
    assert dataset.x[4 * 1 + 2, 1] == pytest.approx(20.0 / 3.0)
    assert dataset.missing.sum() == 6
    assert dataset.grid.n == 6 + 2 * defaults.ADDITIVE_EXTENSION
    assert dataset.grid2.n == 4 + 2 * defaults.ADDITIVE_EXTENSION


def test_invalid_requests():
    with pytest.raises(InvalidRange):
        generate("nope")
    with pytest.raises(InvalidRange):
        generate("exp1", m=1)
    with pytest.raises(InvalidRange):
        generate("additive2d", n1=5, missing_fraction=1.0)


def test_none_overrides_are_ignored():
    assert generate("exp1", seed=0, m=None).m == defaults.EXP1_M
