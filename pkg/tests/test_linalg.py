import numpy as np
import pytest

from core.exceptions import BandwidthMismatch, DimensionMismatch, NotPositiveDefinite, Singular
from linalg import (
    BandedMatrix,
    KroneckerEigen,
    banded_cholesky,
    cholesky_logdet,
    cholesky_solve,
    kron_mv,
    logdet_banded,
    logdet_tridiagonal,
    normal_form,
    sample_from_precision,
    solve_banded,
)


def random_band(n, p, q, seed=0, dominant=True):
    rng = np.random.default_rng(seed)
    M = np.zeros((n, n))
    for k in range(-p, q + 1):
        M += np.diag(rng.normal(size=n - abs(k)), k)
    if dominant:
        M += np.diag(np.full(n, 2.0 * (p + q + 1)))
    return M


def random_spd_band(n, w, seed=0):
    L = random_band(n, w, 0, seed=seed)
    return L @ L.T + np.eye(n)


def test_dense_round_trip_keeps_band_and_zero_padding():
    M = random_band(7, 2, 1)
    B = BandedMatrix.from_dense(M, 2, 1)
    np.testing.assert_allclose(B.to_dense(), M)
    # padding slots of the first super-diagonal and last sub-diagonals
    assert B.bands[0, 0] == 0.0
    assert np.all(B.bands[3, -1:] == 0.0) and np.all(B.bands[2, -1:] == 0.0)


def test_from_dense_rejects_entries_outside_band():
    M = random_band(6, 2, 2)
    with pytest.raises(BandwidthMismatch):
        BandedMatrix.from_dense(M, 1, 1)


def test_storage_is_read_only():
    B = BandedMatrix.identity(4)
    with pytest.raises(ValueError):
        B.bands[0, 0] = 3.0


def test_matvec_transpose_and_add_match_dense():
    M1, M2 = random_band(9, 1, 2, seed=1), random_band(9, 2, 0, seed=2)
    B1, B2 = BandedMatrix.from_dense(M1, 1, 2), BandedMatrix.from_dense(M2, 2, 0)
    x = np.arange(9.0)
    np.testing.assert_allclose(B1 @ x, M1 @ x)
    np.testing.assert_allclose(B1.T.to_dense(), M1.T)
    np.testing.assert_allclose((B1 + B2).to_dense(), M1 + M2)
    np.testing.assert_allclose(B1.add_diagonal(2.0).to_dense(), M1 + 2.0 * np.eye(9))


def test_cholesky_solve_and_logdet():
    M = random_spd_band(30, 2, seed=3)
    B = BandedMatrix.from_dense(M, 2, 2)
    R = banded_cholesky(B)
    assert R.is_lower and R.T.is_upper
    np.testing.assert_allclose(R.to_dense() @ R.to_dense().T, M, atol=1e-10)
    b = np.linspace(-1.0, 1.0, 30)
    np.testing.assert_allclose(cholesky_solve(R, b), np.linalg.solve(M, b), rtol=1e-9)
    assert cholesky_logdet(R) == pytest.approx(np.linalg.slogdet(M)[1], rel=1e-10)


def test_cholesky_rejects_indefinite_and_asymmetric():
    M = -np.eye(5)
    with pytest.raises(NotPositiveDefinite):
        banded_cholesky(BandedMatrix.from_dense(M, 0, 0))
    A = random_band(5, 1, 1)
    with pytest.raises(NotPositiveDefinite):
        banded_cholesky(BandedMatrix.from_dense(A, 1, 1))
    with pytest.raises(BandwidthMismatch):
        banded_cholesky(BandedMatrix.from_dense(random_band(5, 1, 0), 1, 0))


@pytest.mark.parametrize("p,q", [(0, 0), (1, 0), (0, 2), (1, 1), (2, 3)])
def test_solve_banded_matches_dense(p, q):
    M = random_band(25, p, q, seed=p + 10 * q)
    b = np.cos(np.arange(25.0))
    x = solve_banded(BandedMatrix.from_dense(M, p, q), b)
    np.testing.assert_allclose(M @ x, b, atol=1e-10)


def test_solve_banded_detects_singular_matrix():
    M = np.diag([1.0, 0.0, 2.0])
    with pytest.raises(Singular):
        solve_banded(BandedMatrix.from_dense(M, 0, 0), np.ones(3))


def test_solve_banded_length_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_banded(BandedMatrix.identity(4), np.ones(3))


@pytest.mark.parametrize("p,q", [(0, 1), (1, 1), (2, 2), (1, 3)])
def test_logdet_banded_matches_slogdet(p, q):
    M = random_band(40, p, q, seed=7)
    expected = np.linalg.slogdet(M)[1]
    assert logdet_banded(BandedMatrix.from_dense(M, p, q)) == pytest.approx(expected, rel=1e-10)


def test_logdet_spd_path_agrees_with_lu_path():
    B = BandedMatrix.from_dense(random_spd_band(20, 1, seed=4), 1, 1)
    assert logdet_banded(B, assume_spd=True) == pytest.approx(logdet_banded(B), rel=1e-10)


def test_logdet_tridiagonal_single_entry():
    assert logdet_tridiagonal([], [np.e], []) == pytest.approx(1.0)


def test_normal_form_equals_dense_product():
    M = random_band(12, 1, 1, seed=5)
    N = normal_form(BandedMatrix.from_dense(M, 1, 1))
    assert N.p == N.q == 2
    np.testing.assert_allclose(N.to_dense(), M.T @ M, atol=1e-12)


def test_sample_from_precision_zero_noise_is_mean():
    P = BandedMatrix.from_dense(random_spd_band(15, 2, seed=6), 2, 2)
    b = np.ones(15)
    draw = sample_from_precision(P, b, np.zeros(15))
    np.testing.assert_allclose(draw, np.linalg.solve(P.to_dense(), b), rtol=1e-10)


def test_sample_from_precision_covariance():
    P_dense = random_spd_band(4, 1, seed=8)
    P = BandedMatrix.from_dense(P_dense, 1, 1)
    rng = np.random.default_rng(0)
    draws = np.array([sample_from_precision(P, np.zeros(4), rng.standard_normal(4)) for _ in range(20000)])
    np.testing.assert_allclose(np.cov(draws.T), np.linalg.inv(P_dense), atol=0.02)


def test_kron_mv_matches_numpy_kron():
    rng = np.random.default_rng(1)
    E3, E4 = rng.normal(size=(3, 3)), rng.normal(size=(4, 4))
    alpha = rng.normal(size=12)
    np.testing.assert_allclose(kron_mv(E3, E4, alpha), np.kron(E3, E4) @ alpha)


def test_kronecker_eigen_diagonalizes_product():
    Q3 = BandedMatrix.from_dense(random_spd_band(5, 1, seed=1), 1, 1)
    Q4 = BandedMatrix.from_dense(random_spd_band(4, 1, seed=2), 1, 1)
    eig = KroneckerEigen.from_precisions(Q3, Q4)
    Q = np.kron(Q3.to_dense(), Q4.to_dense())
    v = np.arange(20.0)
    back = eig.unrotate(eig.eigenvalues() * eig.rotate(v))
    np.testing.assert_allclose(back, Q @ v, rtol=1e-9)
