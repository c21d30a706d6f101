import math

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from core.exceptions import KindMismatch, WrongKind
from models.run_types import HyperpriorKind
from priors import (
    HyperpriorSpec,
    ar1_beta,
    ar1_coefficients,
    ar1_factor,
    clear_factor_cache,
    logpdf_u,
    logratio_lambda,
    logratio_u_site,
    se_chol,
    se_covariance,
    unwhiten,
    whiten,
)


def spec(kind=HyperpriorKind.AR1, lam=1.5, n=9, h=0.4):
    return HyperpriorSpec(kind=kind, lam=lam, tau_ell=0.8, mu_ell=-0.5, h=h, n=n)


@pytest.fixture
def u():
    return -0.5 + 0.6 * np.sin(np.arange(9))


@pytest.fixture(autouse=True)
def _fresh_cache():
    clear_factor_cache()
    yield
    clear_factor_cache()


def test_ar1_coefficients_sign_and_beta():
    for lam in (0.01, 1.0, 100.0):
        a0, a1 = ar1_coefficients(spec(lam=lam))
        assert a1 < 0 < a0
        assert 0.0 < ar1_beta(spec(lam=lam)) < 1.0
    # longer hyper length-scale, stronger lag-h correlation
    assert ar1_beta(spec(lam=10.0)) > ar1_beta(spec(lam=0.5))


def test_ar1_factor_layout():
    L = ar1_factor(spec()).to_dense()
    a0, a1 = ar1_coefficients(spec())
    np.testing.assert_allclose(np.diag(L)[:-1], a0)
    assert L[-1, -1] == 1.0
    np.testing.assert_allclose(np.diag(L, 1), a1)
    assert np.count_nonzero(np.tril(L, -1)) == 0


@pytest.mark.parametrize("kind", [HyperpriorKind.AR1, HyperpriorKind.SE])
def test_logpdf_matches_dense_gaussian(kind, u):
    s = spec(kind)
    if kind is HyperpriorKind.AR1:
        L = ar1_factor(s).to_dense()
        cov = np.linalg.inv(L.T @ L)
    else:
        R = se_chol(s)
        cov = R @ R.T
    expected = multivariate_normal(np.full(s.n, s.mu_ell), cov).logpdf(u)
    assert logpdf_u(s, u) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("kind", [HyperpriorKind.AR1, HyperpriorKind.SE])
def test_whiten_inverts_unwhiten(kind):
    s = spec(kind)
    zeta = np.linspace(-1.0, 1.0, s.n)
    np.testing.assert_allclose(whiten(s, unwhiten(s, zeta)), zeta, atol=1e-8)


# SE at lambda = h keeps the dense covariance well conditioned
@pytest.mark.parametrize("kind,lam", [(HyperpriorKind.AR1, 1.5), (HyperpriorKind.SE, 0.4)])
@pytest.mark.parametrize("k", [0, 4, 8])
def test_site_logratio_matches_full_difference(kind, lam, k, u):
    s = spec(kind, lam=lam)
    u_new = u.copy()
    u_new[k] += 0.45
    expected = logpdf_u(s, u_new) - logpdf_u(s, u)
    assert logratio_u_site(s, u, k, u_new[k]) == pytest.approx(expected, rel=1e-8, abs=1e-10)
    assert logratio_u_site(s, u, k, u[k]) == 0.0


@pytest.mark.parametrize("h,lam", [(0.1, 1.0), (0.05, 2.0)])
def test_ar1_interior_correlations_decay_exponentially(h, lam):
    s = HyperpriorSpec(kind=HyperpriorKind.AR1, lam=lam, tau_ell=0.8, mu_ell=0.0, h=h, n=400)
    L = ar1_factor(s).to_dense()
    cov = np.linalg.inv(L.T @ L)
    i = 150
    lags = np.arange(1, int(round(3.0 * lam / h)) + 1, 5)
    corr = cov[i, i + lags] / np.sqrt(cov[i, i] * cov[i + lags, i + lags])
    np.testing.assert_allclose(corr, np.exp(-lags * h / lam), rtol=0.05)
    assert cov[i, i] == pytest.approx(s.tau_ell**2, rel=0.02)


def test_lambda_logratio(u):
    old = spec(lam=1.5)
    new = old.with_lambda(2.5)
    assert logratio_lambda(new, old, u) == pytest.approx(logpdf_u(new, u) - logpdf_u(old, u))
    assert logratio_lambda(old, old, u) == 0.0
    with pytest.raises(KindMismatch):
        logratio_lambda(spec(HyperpriorKind.SE), old, u)


def test_const_prior_has_no_process(u):
    s = spec(HyperpriorKind.CONST)
    for operation in (lambda: logpdf_u(s, u), lambda: whiten(s, u), lambda: unwhiten(s, u)):
        with pytest.raises(WrongKind):
            operation()
    with pytest.raises(WrongKind):
        ar1_factor(s)


def test_se_factor_uses_small_relative_jitter():
    # a long hyper length-scale makes the SE covariance numerically singular
    s = spec(HyperpriorKind.SE, lam=50.0, n=30, h=0.1)
    R = se_chol(s)
    C = se_covariance(s)
    jitter = np.diag(R @ R.T - C)
    assert np.all(jitter > 0)
    assert np.max(jitter) <= 1e-6 * s.tau_ell**2 * (1 + 1e-9)
    assert se_chol(s) is R
    assert not R.flags.writeable
    assert math.isfinite(logpdf_u(s, np.full(s.n, s.mu_ell)))
