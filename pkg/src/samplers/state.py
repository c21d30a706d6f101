"""
samplers/state.py
Data bundle, chain state and adaptation state shared by the 1-D samplers.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from field.likelihood import LinearObservations
from field.spde import SpdeConfig
from models.run_types import HyperpriorKind, ModelConfig, SamplerSettings
from priors.hyperpriors import HyperpriorSpec
from samplers.kernels import AdaptiveScale, SiteScales

# Smallest starting noise variance (constant responses have no differenced variance)
MIN_INITIAL_SIGMA2 = 1e-8


@dataclass(frozen=True)
class RegressionData:
    """Observations on a regular grid: y = A z + eps with z on cfg.n nodes"""

    obs: LinearObservations
    spde: SpdeConfig
    grid: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.spde.n

    @property
    def m(self) -> int:
        return self.obs.m

    def initial_log_sigma2(self) -> float:
        """log of half the empirical variance of the first differences of y"""
        if self.obs.m < 2:
            return math.log(MIN_INITIAL_SIGMA2)
        return math.log(max(float(np.var(np.diff(self.obs.y))) / 2.0, MIN_INITIAL_SIGMA2))


@dataclass
class AdaptState:
    """Proposal scales of the random-walk blocks"""

    sigma2: AdaptiveScale
    lam: AdaptiveScale
    sites: Optional[SiteScales] = None

    @classmethod
    def create(cls, settings: SamplerSettings, n_sites: Optional[int] = None) -> "AdaptState":
        def scalar():
            return AdaptiveScale(settings.initial_scale, settings.batch_size, settings.target_accept)

        sites = None
        if n_sites is not None:
            sites = SiteScales(
                n_sites, settings.site_initial_scale, settings.batch_size, settings.target_accept
            )
        return cls(scalar(), scalar(), sites)

    def freeze(self) -> None:
        self.sigma2.freeze()
        self.lam.freeze()
        if self.sites is not None:
            self.sites.freeze()

    @property
    def frozen(self) -> bool:
        return self.sigma2.frozen

    def acceptance_rates(self) -> Dict[str, float]:
        rates = {
            "log_sigma2": self.sigma2.acceptance_rate,
            "log_lambda": self.lam.acceptance_rate,
        }
        if self.sites is not None and self.sites.decisions:
            rates["u_sites"] = float(self.sites.total_accepted.sum()) / self.sites.decisions
        return rates


@dataclass
class ChainState:
    """
    Current values of one chain.

    ``zeta`` is kept whenever the sampler works on whitened u; ``xi`` only for
    the whitened elliptical scheme; ``marginal`` caches log p(y | u, sigma2) for
    the marginal scheme.
    """

    z: np.ndarray
    u: np.ndarray
    log_lambda: float
    log_sigma2: float
    adapt: AdaptState
    zeta: Optional[np.ndarray] = None
    xi: Optional[np.ndarray] = None
    marginal: Optional[float] = None
    iteration: int = 0
    extras: Dict[str, float] = field(default_factory=dict)

    @property
    def lam(self) -> float:
        return math.exp(self.log_lambda)

    @property
    def sigma2(self) -> float:
        return math.exp(self.log_sigma2)


def hyperprior_spec(model: ModelConfig, data: RegressionData, log_lambda: float) -> HyperpriorSpec:
    """Hyperprior on u for the given lambda"""
    return HyperpriorSpec(
        kind=model.hyperprior,
        lam=math.exp(log_lambda),
        tau_ell=model.tau_ell,
        mu_ell=model.mu_ell,
        h=data.spde.h,
        n=data.n,
    )


def is_stationary(model: ModelConfig) -> bool:
    return model.hyperprior is HyperpriorKind.CONST


__all__ = [
    "RegressionData",
    "AdaptState",
    "ChainState",
    "hyperprior_spec",
    "is_stationary",
]
