"""
priors/elicitation.py
Data-driven choice of the prior mean and magnitude of the log length-scale process.
"""

import math
from typing import Tuple

import numpy as np

from config.constants.defaults import ELICITATION_WIDTH
from core.exceptions import InvalidRange


def elicit_prior(alpha: float, beta: float) -> Tuple[float, float]:
    """
    Solve mu -/+ 1.96 tau = (log alpha, log beta).

    Args:
        alpha: Smallest plausible length-scale (minimum covariate distance)
        beta: Largest plausible length-scale (maximum covariate distance)

    Returns:
        (mu_ell, tau_ell)
    """
    if not 0 < alpha < beta:
        raise InvalidRange(f"Need 0 < alpha < beta, got alpha={alpha}, beta={beta}")
    log_alpha, log_beta = math.log(alpha), math.log(beta)
    return (log_alpha + log_beta) / 2.0, (log_beta - log_alpha) / ELICITATION_WIDTH


def covariate_range(x) -> Tuple[float, float]:
    """(minimum distance between distinct covariate values, overall range)."""
    values = np.unique(np.asarray(x, dtype=float).ravel())
    if values.size < 2:
        raise InvalidRange("Need at least two distinct covariate values")
    return float(np.min(np.diff(values))), float(values[-1] - values[0])


def elicit_from_covariates(x) -> Tuple[float, float]:
    return elicit_prior(*covariate_range(x))


__all__ = ["elicit_prior", "covariate_range", "elicit_from_covariates"]
