# field package

from .spde import (
    SpdeConfig,
    LengthScaleField,
    FieldFactor,
    build_L,
    precision,
    field_logpdf,
    logratio_prior_z,
)
from .covariance import stat_matern, se_cov, ns_matern, matern_kernel_scale
from .likelihood import (
    LinearObservations,
    gaussian_loglik,
    sample_latent,
    sample_latent_from_precision,
    marginal_loglik,
    marginal_loglik_from_precision,
)

__all__ = [
    "SpdeConfig",
    "LengthScaleField",
    "FieldFactor",
    "build_L",
    "precision",
    "field_logpdf",
    "logratio_prior_z",
    "stat_matern",
    "se_cov",
    "ns_matern",
    "matern_kernel_scale",
    "LinearObservations",
    "gaussian_loglik",
    "sample_latent",
    "sample_latent_from_precision",
    "marginal_loglik",
    "marginal_loglik_from_precision",
]
