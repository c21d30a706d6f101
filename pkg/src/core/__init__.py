# core package

from .logger import setup_logging, get_logger, get_main_logger
from .exceptions import (
    NsgpError,
    NotPositiveDefinite,
    Singular,
    BandwidthMismatch,
    DimensionMismatch,
    MultiSiteDiff,
    WrongKind,
    KindMismatch,
    InvalidRange,
    NonFiniteLogPost,
    DegenerateChain,
    OutOfHull,
    ConfigError,
    DataFormatError,
)

__all__ = [
    "setup_logging",
    "get_logger",
    "get_main_logger",
    "NsgpError",
    "NotPositiveDefinite",
    "Singular",
    "BandwidthMismatch",
    "DimensionMismatch",
    "MultiSiteDiff",
    "WrongKind",
    "KindMismatch",
    "InvalidRange",
    "NonFiniteLogPost",
    "DegenerateChain",
    "OutOfHull",
    "ConfigError",
    "DataFormatError",
]
