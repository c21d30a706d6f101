"""
run_types.py
Enums and configuration records shared by the samplers, the additive model and the CLI.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from config.constants import defaults
from core.exceptions import ConfigError


class HyperpriorKind(Enum):
    """Prior on the log length-scale process"""

    AR1 = "ar1"
    SE = "se"
    CONST = "const"  # stationary baseline, u = log lambda everywhere


class SamplerKind(Enum):
    """1-D sampling scheme"""

    MWG = "mwg"
    WELLSS = "wellss"
    MELLSS = "mellss"


class DeterminantPath(Enum):
    """How log det of the marginal covariance is evaluated"""

    BANDED = "banded"  # matrix determinant lemma, O(n)
    PROJECTED = "projected"  # m x m determinant after a banded solve


@dataclass(frozen=True)
class GaussianPrior:
    """Normal prior on a scalar log-parameter"""

    mean: float
    var: float

    def __post_init__(self):
        if not self.var > 0:
            raise ConfigError(f"Prior variance must be positive, got {self.var}")

    def logpdf(self, x: float) -> float:
        return -0.5 * (math.log(2.0 * math.pi * self.var) + (x - self.mean) ** 2 / self.var)


@dataclass(frozen=True)
class SamplerSettings:
    """
    Run length, thinning and adaptation settings. The ``update_*`` switches
    and ``use_likelihood`` exist to freeze blocks or sample the prior.
    """

    iterations: int = defaults.ITERATIONS
    burnin_fraction: float = defaults.BURNIN_FRACTION
    thin: int = defaults.THIN
    batch_size: int = defaults.ADAPT_BATCH_SIZE
    target_accept: float = defaults.ADAPT_TARGET_ACCEPT
    initial_scale: float = defaults.INITIAL_SCALE
    site_initial_scale: float = defaults.SITE_INITIAL_SCALE
    use_likelihood: bool = True
    update_sigma2: bool = True
    update_lambda: bool = True
    update_length_scales: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 <= self.burnin_fraction < 1.0:
            raise ConfigError(f"burnin_fraction must lie in [0, 1), got {self.burnin_fraction}")
        if self.thin < 1:
            raise ConfigError(f"thin must be >= 1, got {self.thin}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 < self.target_accept < 1.0:
            raise ConfigError(f"target_accept must lie in (0, 1), got {self.target_accept}")
        for name in ("initial_scale", "site_initial_scale"):
            value = getattr(self, name)
            if not defaults.SCALE_MIN <= value <= defaults.SCALE_MAX:
                raise ConfigError(f"{name} must lie in [{defaults.SCALE_MIN}, {defaults.SCALE_MAX}]")

    @property
    def burnin(self) -> int:
        return int(math.floor(self.iterations * self.burnin_fraction))

    @property
    def kept(self) -> int:
        return (self.iterations - self.burnin) // self.thin


@dataclass(frozen=True)
class ModelConfig:
    """Hyperprior family, fixed constants and priors of the hierarchical model"""

    hyperprior: HyperpriorKind = HyperpriorKind.AR1
    mu_ell: float = defaults.MU_ELL
    tau_ell: float = defaults.TAU_ELL
    log_lambda_prior: GaussianPrior = field(
        default_factory=lambda: GaussianPrior(defaults.LOG_LAMBDA_MEAN, defaults.LOG_LAMBDA_VAR)
    )
    log_sigma2_prior: GaussianPrior = field(
        default_factory=lambda: GaussianPrior(defaults.LOG_SIGMA2_MEAN, defaults.LOG_SIGMA2_VAR)
    )
    sampler: SamplerSettings = field(default_factory=SamplerSettings)
    tau: float = defaults.FIELD_TAU
    nu: float = defaults.FIELD_NU
    det_path: DeterminantPath = DeterminantPath.BANDED

    def __post_init__(self):
        if not self.tau_ell > 0:
            raise ConfigError(f"tau_ell must be positive, got {self.tau_ell}")
        if not self.tau > 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved command-line run (defaults, then config file, then flags)"""

    command: str
    out_dir: str
    seed: int = 0
    experiment: Optional[str] = None
    data_path: Optional[str] = None
    truth_path: Optional[str] = None
    trace_dir: Optional[str] = None
    sampler: SamplerKind = SamplerKind.MELLSS
    model: ModelConfig = field(default_factory=ModelConfig)
    grid_n: Optional[int] = None
    n_ext: Optional[int] = None
    elicit_prior: bool = False
    interaction: bool = False
    chains: int = 1
    m: Optional[int] = None
    noise_var: Optional[float] = None
    missing_fraction: float = 0.0
    surface_draws: int = defaults.SURFACE_DRAWS

    def __post_init__(self):
        if self.command not in ("simulate", "fit", "fit2d", "diagnose"):
            raise ConfigError(f"Unknown command: {self.command}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.chains < 1:
            raise ConfigError(f"chains must be >= 1, got {self.chains}")
        if self.experiment is not None and self.experiment not in defaults.EXPERIMENTS:
            raise ConfigError(f"Unknown experiment: {self.experiment}")
        if self.grid_n is not None and self.grid_n < 5:
            raise ConfigError(f"grid n must be >= 5, got {self.grid_n}")
        if self.n_ext is not None and self.n_ext < 0:
            raise ConfigError(f"extension size must be >= 0, got {self.n_ext}")
        if self.m is not None and self.m < 2:
            raise ConfigError(f"m must be >= 2, got {self.m}")
        if self.noise_var is not None and not self.noise_var > 0:
            raise ConfigError(f"noise variance must be positive, got {self.noise_var}")
        if not 0.0 <= self.missing_fraction < 1.0:
            raise ConfigError(f"missing fraction must lie in [0, 1), got {self.missing_fraction}")
        if self.surface_draws < 1:
            raise ConfigError(f"surface draws must be >= 1, got {self.surface_draws}")
