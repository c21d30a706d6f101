"""
core/exceptions.py
Exception hierarchy shared by the numerical kernels, the samplers and the CLI.
"""

import numpy as np


class NsgpError(Exception):
    """Base class for every error raised by this package"""


class NotPositiveDefinite(NsgpError, np.linalg.LinAlgError):
    """A Cholesky pivot was not strictly positive"""


class Singular(NsgpError, np.linalg.LinAlgError):
    """An LU pivot underflowed, the matrix is numerically singular"""


class BandwidthMismatch(NsgpError, ValueError):
    """Band layout does not fit the requested operation"""


class DimensionMismatch(NsgpError, ValueError):
    """Vector or matrix sizes disagree"""


class MultiSiteDiff(NsgpError, ValueError):
    """Two length-scale fields differ in more than one coordinate"""


class WrongKind(NsgpError, ValueError):
    """Operation is not defined for this hyperprior kind"""


class KindMismatch(NsgpError, ValueError):
    """Two hyperprior specs are not comparable"""


class InvalidRange(NsgpError, ValueError):
    """Numeric argument outside its admissible range"""


class NonFiniteLogPost(NsgpError, ValueError):
    """Log posterior is not finite at the current state"""


class DegenerateChain(NsgpError, ValueError):
    """Chain is too short or has zero variance"""


class OutOfHull(NsgpError, ValueError):
    """Observation lies outside the computational grid"""


class ConfigError(NsgpError, ValueError):
    """Invalid run configuration"""


class DataFormatError(NsgpError, ValueError):
    """Malformed input file"""


__all__ = [
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
