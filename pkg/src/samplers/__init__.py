# samplers package

from .kernels import (
    AdaptiveScale,
    SiteScales,
    RandomWalkResult,
    EllipticalSliceResult,
    adaptive_rw_step,
    ess_slice_step,
)
from .state import AdaptState, ChainState, RegressionData, hyperprior_spec
from .mcmc import (
    guarded,
    BaseSampler,
    MwgSampler,
    WhitenedEllipticalSampler,
    MarginalEllipticalSampler,
    make_sampler,
    mwg_iteration,
    wellss_iteration,
    mellss_iteration,
)
from .chain import Trace, run_chain

__all__ = [
    "guarded",
    "AdaptiveScale",
    "SiteScales",
    "RandomWalkResult",
    "EllipticalSliceResult",
    "adaptive_rw_step",
    "ess_slice_step",
    "AdaptState",
    "ChainState",
    "RegressionData",
    "hyperprior_spec",
    "BaseSampler",
    "MwgSampler",
    "WhitenedEllipticalSampler",
    "MarginalEllipticalSampler",
    "make_sampler",
    "mwg_iteration",
    "wellss_iteration",
    "mellss_iteration",
    "Trace",
    "run_chain",
]
