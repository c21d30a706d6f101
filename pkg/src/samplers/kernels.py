"""
samplers/kernels.py
Reusable MCMC moves: adaptive random-walk Metropolis on a scalar and
elliptical slice sampling on a whitened vector.
"""

import logging
import math
from typing import Callable, NamedTuple, Optional

import numpy as np

from config.constants import defaults
from core.exceptions import NonFiniteLogPost

logger = logging.getLogger(__name__)


def _clip_scale(scale):
    return np.clip(scale, defaults.SCALE_MIN, defaults.SCALE_MAX)


def _batch_step(batch_index: int) -> float:
    return min(defaults.ADAPT_MAX_STEP, batch_index**-0.5)


class AdaptiveScale:
    """
    Proposal standard deviation of a scalar random walk.

    After every batch of proposals the scale is multiplied by exp(+delta) when
    the batch acceptance rate exceeds the target and by exp(-delta) otherwise,
    with delta = min(0.05, b^-1/2) for the b-th batch. freeze() stops it.
    """

    def __init__(
        self,
        scale: float = defaults.INITIAL_SCALE,
        batch_size: int = defaults.ADAPT_BATCH_SIZE,
        target: float = defaults.ADAPT_TARGET_ACCEPT,
    ):
        self.scale = float(_clip_scale(scale))
        self.batch_size = batch_size
        self.target = target
        self.frozen = False
        self.batches = 0
        self.batch_accepted = 0
        self.batch_proposed = 0
        self.total_accepted = 0
        self.total_proposed = 0

    def record(self, accepted: bool) -> None:
        self.batch_proposed += 1
        self.total_proposed += 1
        if accepted:
            self.batch_accepted += 1
            self.total_accepted += 1
        if self.batch_proposed >= self.batch_size:
            if not self.frozen:
                self._adapt()
            self.batch_accepted = self.batch_proposed = 0

    def _adapt(self) -> None:
        self.batches += 1
        delta = _batch_step(self.batches)
        rate = self.batch_accepted / self.batch_proposed
        self.scale = float(_clip_scale(self.scale * math.exp(delta if rate > self.target else -delta)))

    def freeze(self) -> None:
        self.frozen = True

    @property
    def acceptance_rate(self) -> float:
        return self.total_accepted / self.total_proposed if self.total_proposed else 0.0


class SiteScales:
    """Per-site proposal scales for single-site updates, adapted with the same rule."""

    def __init__(
        self,
        n: int,
        scale: float = defaults.SITE_INITIAL_SCALE,
        batch_size: int = defaults.ADAPT_BATCH_SIZE,
        target: float = defaults.ADAPT_TARGET_ACCEPT,
    ):
        self.scales = _clip_scale(np.full(n, float(scale)))
        self.batch_size = batch_size
        self.target = target
        self.frozen = False
        self.batches = 0
        self.sweeps_in_batch = 0
        self.batch_accepted = np.zeros(n, dtype=int)
        self.total_accepted = np.zeros(n, dtype=int)
        self.decisions = 0

    def record_sweep(self, accepted: np.ndarray) -> None:
        accepted = np.asarray(accepted, dtype=bool)
        self.decisions += accepted.size
        self.batch_accepted += accepted
        self.total_accepted += accepted
        self.sweeps_in_batch += 1
        if self.sweeps_in_batch >= self.batch_size:
            if not self.frozen:
                self.batches += 1
                delta = _batch_step(self.batches)
                rate = self.batch_accepted / self.sweeps_in_batch
                self.scales = _clip_scale(self.scales * np.exp(np.where(rate > self.target, delta, -delta)))
            self.batch_accepted[:] = 0
            self.sweeps_in_batch = 0

    def freeze(self) -> None:
        self.frozen = True


class RandomWalkResult(NamedTuple):
    value: float
    accepted: bool
    logpost: float


def adaptive_rw_step(
    logpost: Callable[[float], float],
    x: float,
    scale_state: AdaptiveScale,
    rng: np.random.Generator,
    current_logpost: Optional[float] = None,
) -> RandomWalkResult:
    """
    @brief One Metropolis step x' = x + s N(0, 1) on a log-scale parameter
    @param logpost: Log posterior (prior included) as a function of x
    @param x: Current value
    @param scale_state: Adaptive proposal scale, updated in place
    @param rng: Random generator
    @param current_logpost: logpost(x) if already known (any consistent reference works)
    @return RandomWalkResult: (value, accepted, logpost at value)
    @raises NonFiniteLogPost: If logpost(x) is not finite
    """
    current = logpost(x) if current_logpost is None else current_logpost
    if not math.isfinite(current):
        raise NonFiniteLogPost(f"Log posterior is {current} at x={x}")

    proposal = x + scale_state.scale * rng.standard_normal()
    log_u = math.log(1.0 - rng.random())
    candidate = logpost(proposal)
    accepted = math.isfinite(candidate) and log_u <= candidate - current
    scale_state.record(accepted)
    if accepted:
        return RandomWalkResult(float(proposal), True, float(candidate))
    return RandomWalkResult(float(x), False, float(current))


class EllipticalSliceResult(NamedTuple):
    value: np.ndarray
    loglik: float
    evaluations: int


# Bracket width below which the slice has collapsed onto the current state
_MIN_BRACKET = 1e-12


def ess_slice_step(
    loglik: Callable[[np.ndarray], float],
    v,
    rng: np.random.Generator,
    current_loglik: Optional[float] = None,
    nu=None,
    theta: Optional[float] = None,
) -> EllipticalSliceResult:
    """
    @brief Elliptical slice move for v with a standard normal prior
    @param loglik: Log-likelihood of the whitened vector
    @param v: Current whitened vector
    @param rng: Random generator
    @param current_loglik: loglik(v) if already known
    @param nu: Prior draw defining the ellipse (drawn from N(0, I) when omitted)
    @param theta: Initial angle (drawn uniformly on [0, 2 pi) when omitted)
    @return EllipticalSliceResult: (new vector, its loglik, number of evaluations)
    """
    v = np.asarray(v, dtype=float)
    current = loglik(v) if current_loglik is None else current_loglik
    if not math.isfinite(current):
        raise NonFiniteLogPost(f"Log-likelihood is {current} at the current state")

    nu = rng.standard_normal(v.shape) if nu is None else np.asarray(nu, dtype=float)
    threshold = current + math.log(1.0 - rng.random())
    if theta is None:
        theta = rng.uniform(0.0, 2.0 * math.pi)
    lower, upper = theta - 2.0 * math.pi, theta

    evaluations = 0
    while True:
        proposal = v * math.cos(theta) + nu * math.sin(theta)
        candidate = loglik(proposal)
        evaluations += 1
        if math.isfinite(candidate) and candidate > threshold:
            return EllipticalSliceResult(proposal, float(candidate), evaluations)
        # Shrink the bracket towards theta = 0
        if theta < 0:
            lower = theta
        else:
            upper = theta
        if upper - lower < _MIN_BRACKET:
            logger.warning("Elliptical slice bracket collapsed, keeping current state")
            return EllipticalSliceResult(v.copy(), float(current), evaluations)
        theta = rng.uniform(lower, upper)


__all__ = [
    "AdaptiveScale",
    "SiteScales",
    "RandomWalkResult",
    "adaptive_rw_step",
    "EllipticalSliceResult",
    "ess_slice_step",
]
