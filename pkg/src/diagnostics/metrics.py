"""
diagnostics/metrics.py
Chain and fit diagnostics: effective sample size, overall efficiency score,
mean absolute error, empirical coverage and credible bands.
"""

from typing import Tuple

import numpy as np
from scipy import fft

from config.constants import defaults
from core.exceptions import DegenerateChain, DimensionMismatch, InvalidRange

MIN_CHAIN_LENGTH = 10


def autocovariance(x) -> np.ndarray:
    """Biased sample autocovariance of a 1-D series at every lag, via zero-padded FFT."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    size = fft.next_fast_len(2 * n)
    centered = x - x.mean()
    spectrum = fft.rfft(centered, n=size)
    return fft.irfft(spectrum * np.conjugate(spectrum), n=size)[:n] / n


def _check_chain(chain) -> np.ndarray:
    chain = np.asarray(chain, dtype=float)
    if chain.ndim != 1:
        raise DimensionMismatch(f"Expected a 1-D chain, got shape {chain.shape}")
    if chain.shape[0] < MIN_CHAIN_LENGTH:
        raise DegenerateChain(f"Chain of length {chain.shape[0]} is shorter than {MIN_CHAIN_LENGTH}")
    if not np.all(np.isfinite(chain)):
        raise DegenerateChain("Chain contains non-finite values")
    if np.ptp(chain) == 0.0:
        raise DegenerateChain("Chain has zero variance")
    return chain


def ess(chain) -> float:
    """
    @brief Effective sample size N / tau with Geyer's initial positive and monotone sequences
    @param chain: Scalar series of length >= 10
    @return float: ESS clipped to (0, N]
    @raises DegenerateChain: If the chain is too short or constant
    """
    chain = _check_chain(chain)
    n = chain.shape[0]
    acov = autocovariance(chain)
    mean_var = acov[0] * n / (n - 1.0)
    var_plus = mean_var * (n - 1.0) / n

    rho = np.zeros(n)
    rho_even = 1.0
    rho[0] = rho_even
    rho_odd = 1.0 - (mean_var - acov[1]) / var_plus
    rho[1] = rho_odd

    # initial positive sequence
    t = 1
    while t < n - 2 and rho_even + rho_odd >= 0.0:
        rho_even = 1.0 - (mean_var - acov[t + 1]) / var_plus
        rho_odd = 1.0 - (mean_var - acov[t + 2]) / var_plus
        rho[t + 1] = rho_even
        if rho_even + rho_odd >= 0.0:
            rho[t + 2] = rho_odd
        t += 2
    max_t = t

    # initial monotone sequence
    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0
            rho[t + 2] = rho[t + 1]
        t += 2

    tau = -1.0 + 2.0 * np.sum(rho[:max_t]) + np.sum(rho[max_t + 1 : max_t + 2])
    if not (np.isfinite(tau) and tau > 0):
        return float(n)
    return float(min(n / tau, n))


def ess_columns(samples) -> np.ndarray:
    """ESS of every column of a (samples x coordinates) array; constant columns get NaN."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    out = np.full(samples.shape[1], np.nan)
    for j in range(samples.shape[1]):
        try:
            out[j] = ess(samples[:, j])
        except DegenerateChain:
            continue
    return out


def geweke_z(chain, first: float = 0.1, last: float = 0.5) -> float:
    """Difference of the means of the first and last segments in units of its standard error."""
    if not (0 < first < 1 and 0 < last < 1 and first + last < 1):
        raise InvalidRange(f"Invalid segment fractions ({first}, {last})")
    chain = _check_chain(chain)
    n = chain.shape[0]
    head = chain[: max(int(first * n), 2)]
    tail = chain[int((1.0 - last) * n) :]

    def mean_variance(segment):
        if segment.shape[0] >= MIN_CHAIN_LENGTH and np.ptp(segment) > 0:
            return segment.var() / ess(segment)
        return segment.var() / segment.shape[0]

    se = np.sqrt(mean_variance(head) + mean_variance(tail))
    if se == 0.0:
        raise DegenerateChain("Segments have zero variance")
    return float((head.mean() - tail.mean()) / se)


def oes(ess_value: float, cpu_minutes: float) -> float:
    """Overall efficiency score: effective samples per minute"""
    if not cpu_minutes > 0:
        raise InvalidRange(f"CPU time must be positive, got {cpu_minutes}")
    return ess_value / cpu_minutes


def mae(estimate, truth) -> float:
    estimate, truth = np.asarray(estimate, dtype=float), np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise DimensionMismatch(f"Estimate {estimate.shape} and truth {truth.shape} differ")
    return float(np.mean(np.abs(estimate - truth)))


def credible_band(samples, level: float = defaults.CREDIBLE_LEVEL) -> Tuple[np.ndarray, np.ndarray]:
    """
    @brief Equal-tailed per-coordinate credible band
    @param samples: (samples x coordinates) array
    @param level: Credible level in (0, 1)
    @return tuple: (lower, upper) empirical quantiles
    """
    if not 0 < level < 1:
        raise InvalidRange(f"Credible level must lie in (0, 1), got {level}")
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] == 0:
        raise DegenerateChain("No samples to summarize")
    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(samples, [alpha, 1.0 - alpha], axis=0)
    return lower, upper


def ec(bands: Tuple[np.ndarray, np.ndarray], truth) -> float:
    """Fraction of coordinates whose truth lies inside its band (ends included)"""
    lower, upper = (np.asarray(b, dtype=float) for b in bands)
    truth = np.asarray(truth, dtype=float)
    if not lower.shape == upper.shape == truth.shape:
        raise DimensionMismatch("Band and truth shapes differ")
    return float(np.mean((truth >= lower) & (truth <= upper)))


__all__ = [
    "MIN_CHAIN_LENGTH",
    "autocovariance",
    "ess",
    "ess_columns",
    "geweke_z",
    "oes",
    "mae",
    "credible_band",
    "ec",
]
