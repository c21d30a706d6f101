# additive package

from .model import (
    MISSING,
    EXTENSION,
    Grid2D,
    AdditiveData,
    AdditiveState,
    center_components,
    additive_design,
    additive_mean,
    interaction_eigen,
    z3_posterior_draw,
    z3_prior_draw,
    block_marginal_loglik_1d,
    block_marginal_loglik_interaction,
    impute_missing,
)
from .block_sampler import BlockMarginalSampler, AdditiveTrace, block_mellss_iteration, run_additive_chain

__all__ = [
    "MISSING",
    "EXTENSION",
    "Grid2D",
    "AdditiveData",
    "AdditiveState",
    "center_components",
    "additive_design",
    "additive_mean",
    "interaction_eigen",
    "z3_posterior_draw",
    "z3_prior_draw",
    "block_marginal_loglik_1d",
    "block_marginal_loglik_interaction",
    "impute_missing",
    "BlockMarginalSampler",
    "AdditiveTrace",
    "block_mellss_iteration",
    "run_additive_chain",
]
