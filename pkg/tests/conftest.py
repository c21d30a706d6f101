import numpy as np
import pytest

from core.logger import setup_logging
from data.grid import build_observation_operator, extend_domain, make_grid, standardize
from field.likelihood import LinearObservations
from field.spde import SpdeConfig
from samplers.state import RegressionData


def make_regression_data(m=15, n_interior=15, n_ext=3, seed=0):
    rng = np.random.default_rng(seed)
    grid = extend_domain(make_grid(0.0, 3.0, n_interior), n_ext)
    x = np.linspace(0.0, 3.0, m)
    y = np.sin(2.0 * x) + 0.1 * rng.standard_normal(m)
    y_std, _, _ = standardize(y)
    A = build_observation_operator(x, grid)
    return RegressionData(
        LinearObservations(A, y_std),
        SpdeConfig(grid.n, grid.h, grid.n_ext),
        grid.nodes,
    )


@pytest.fixture
def regression_data():
    return make_regression_data()


@pytest.fixture(autouse=True, scope="session")
def _quiet_logging():
    setup_logging(log_to_console=False)
