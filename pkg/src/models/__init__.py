# models package

from .run_types import (
    HyperpriorKind,
    SamplerKind,
    DeterminantPath,
    GaussianPrior,
    SamplerSettings,
    ModelConfig,
    RunConfig,
)

__all__ = [
    "HyperpriorKind",
    "SamplerKind",
    "DeterminantPath",
    "GaussianPrior",
    "SamplerSettings",
    "ModelConfig",
    "RunConfig",
]
