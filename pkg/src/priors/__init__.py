# priors package

from .hyperpriors import (
    HyperpriorSpec,
    ar1_coefficients,
    ar1_factor,
    ar1_beta,
    se_covariance,
    se_chol,
    unwhiten,
    whiten,
    logpdf_u,
    logratio_u_site,
    logratio_lambda,
    clear_factor_cache,
)
from .elicitation import elicit_prior, covariate_range, elicit_from_covariates

__all__ = [
    "HyperpriorSpec",
    "ar1_coefficients",
    "ar1_factor",
    "ar1_beta",
    "se_covariance",
    "se_chol",
    "unwhiten",
    "whiten",
    "logpdf_u",
    "logratio_u_site",
    "logratio_lambda",
    "clear_factor_cache",
    "elicit_prior",
    "covariate_range",
    "elicit_from_covariates",
]
