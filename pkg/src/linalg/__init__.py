# linalg package

from .banded import (
    BandedMatrix,
    banded_cholesky,
    cholesky_solve,
    cholesky_logdet,
    solve_banded,
    logdet_banded,
    logdet_tridiagonal,
    normal_form,
    sample_from_precision,
)
from .kronecker import kron_mv, KroneckerEigen

__all__ = [
    "BandedMatrix",
    "banded_cholesky",
    "cholesky_solve",
    "cholesky_logdet",
    "solve_banded",
    "logdet_banded",
    "logdet_tridiagonal",
    "normal_form",
    "sample_from_precision",
    "kron_mv",
    "KroneckerEigen",
]
