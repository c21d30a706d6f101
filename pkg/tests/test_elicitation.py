import math

import numpy as np
import pytest

from core.exceptions import InvalidRange
from priors import covariate_range, elicit_from_covariates, elicit_prior


def test_elicited_quantiles_hit_the_plausible_range():
    alpha, beta = 0.01, 4.0
    mu, tau = elicit_prior(alpha, beta)
    assert mu - 1.96 * tau == pytest.approx(math.log(alpha))
    assert mu + 1.96 * tau == pytest.approx(math.log(beta))


def test_covariate_range_ignores_duplicates_and_order():
    x = np.array([0.5, 0.1, 0.1, 0.9, 0.3])
    smallest, total = covariate_range(x)
    assert smallest == pytest.approx(0.2)
    assert total == pytest.approx(0.8)


def test_elicit_from_equispaced_covariates():
    x = np.linspace(0.0, 1.0, 512)
    mu, tau = elicit_from_covariates(x)
    assert mu == pytest.approx(0.5 * math.log(1.0 / 511))
    assert tau > 0


def test_invalid_ranges_rejected():
    with pytest.raises(InvalidRange):
        elicit_prior(1.0, 1.0)
    with pytest.raises(InvalidRange):
        covariate_range([2.0, 2.0])
