"""
samplers/mcmc.py
The three 1-D samplers of the hierarchical model:

- MWG: Metropolis-within-Gibbs with a joint draw of z and single-site u updates
- w-ELL-SS: elliptical slice on whitened u with z whitened as xi = L(u) z
- m-ELL-SS: elliptical slice on whitened u against the marginal likelihood (z integrated out)

Every scheme updates log sigma2 and log lambda with adaptive random walks.
Under the CONST hyperprior u = log lambda at every node and the u block is skipped.
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable

import numpy as np

from core.exceptions import NsgpError
from field.likelihood import (
    gaussian_loglik,
    marginal_loglik_from_precision,
    sample_latent_from_precision,
)
from field.spde import FieldFactor, build_L, field_logpdf
from linalg.banded import logdet_banded, normal_form, sample_from_precision, solve_banded
from models.run_types import ModelConfig, SamplerKind
from priors.hyperpriors import logratio_lambda, logratio_u_site, unwhiten, whiten
from samplers.kernels import adaptive_rw_step, ess_slice_step
from samplers.state import AdaptState, ChainState, RegressionData, hyperprior_spec, is_stationary

logger = logging.getLogger(__name__)

# Failures that turn a proposal into a zero-density point instead of aborting the chain
_PROPOSAL_FAILURES = (NsgpError, OverflowError, FloatingPointError)


def guarded(fn: Callable[..., float]) -> Callable[..., float]:
    """Wrap a log density so numerical failures and non-finite values become -inf."""

    def wrapper(*args) -> float:
        try:
            value = fn(*args)
        except _PROPOSAL_FAILURES as e:
            logger.debug(f"Proposal rejected: {e}")
            return -np.inf
        return float(value) if np.isfinite(value) else -np.inf

    return wrapper


class BaseSampler(ABC):
    """Shared set-up of the 1-D samplers"""

    kind: SamplerKind

    def __init__(self, data: RegressionData, model: ModelConfig, rng: np.random.Generator):
        """
        @brief BaseSampler constructor
        @param data: Observations and grid
        @param model: Hyperprior, priors and sampler settings
        @param rng: Random generator of the chain
        """
        self.data = data
        self.model = model
        self.settings = model.sampler
        self.rng = rng
        self.stationary = is_stationary(model)
        self.logger = logging.getLogger(self.__class__.__name__)

    # ===== HELPERS =====

    def spec(self, log_lambda: float):
        return hyperprior_spec(self.model, self.data, log_lambda)

    def constant_field(self, log_lambda: float) -> np.ndarray:
        return np.full(self.data.n, float(log_lambda))

    def field_from_whitened(self, zeta: np.ndarray, log_lambda: float) -> np.ndarray:
        if self.stationary:
            return self.constant_field(log_lambda)
        return unwhiten(self.spec(log_lambda), zeta)

    def latent_loglik(self, z: np.ndarray, log_sigma2: float) -> float:
        if not self.settings.use_likelihood:
            return 0.0
        rss = self.data.obs.residual_sum_of_squares(z)
        return gaussian_loglik(rss, self.data.m, float(np.exp(log_sigma2)))

    def marginal_loglik(self, u: np.ndarray, log_sigma2: float) -> float:
        if not self.settings.use_likelihood:
            return 0.0
        L = build_L(u, self.data.spde)
        return marginal_loglik_from_precision(
            normal_form(L),
            float(np.exp(log_sigma2)),
            self.data.obs,
            logdet_Q=2.0 * logdet_banded(L),
            det_path=self.model.det_path,
        )

    def draw_latent(self, u: np.ndarray, log_sigma2: float, noise=None) -> np.ndarray:
        """Exact conditional draw of z (the prior when the likelihood is switched off)."""
        if noise is None:
            noise = self.rng.standard_normal(self.data.n)
        Q = normal_form(build_L(u, self.data.spde))
        if not self.settings.use_likelihood:
            return sample_from_precision(Q, np.zeros(self.data.n), noise)
        return sample_latent_from_precision(Q, float(np.exp(log_sigma2)), self.data.obs, noise)

    def lambda_prior(self, log_lambda: float) -> float:
        return self.model.log_lambda_prior.logpdf(log_lambda)

    def sigma2_prior(self, log_sigma2: float) -> float:
        return self.model.log_sigma2_prior.logpdf(log_sigma2)

    # ===== STATE =====

    def initial_state(self) -> ChainState:
        """u at mu_ell (zeta = 0), log lambda at its prior mean, z at the posterior mean."""
        log_lambda = float(self.model.log_lambda_prior.mean)
        log_sigma2 = self.data.initial_log_sigma2()
        zeta = None if self.stationary else np.zeros(self.data.n)
        u = self.field_from_whitened(zeta, log_lambda)
        z = self.draw_latent(u, log_sigma2, noise=np.zeros(self.data.n))
        state = ChainState(
            z=z,
            u=u,
            log_lambda=log_lambda,
            log_sigma2=log_sigma2,
            adapt=AdaptState.create(self.settings, self.site_count()),
            zeta=zeta,
        )
        self.logger.debug(
            f"Initial state: log_lambda={log_lambda:.3f}, log_sigma2={log_sigma2:.3f}"
        )
        return self.prepare(state)

    def site_count(self):
        return None

    def prepare(self, state: ChainState) -> ChainState:
        return state

    def recorded_latent(self, state: ChainState) -> np.ndarray:
        """z stored in the trace at a recording iteration"""
        return state.z.copy()

    @abstractmethod
    def iterate(self, state: ChainState) -> ChainState:
        """
        @brief One full sweep over all blocks
        @param state: Chain state, updated in place
        @return ChainState: The same object
        """
        pass

    # ===== SHARED BLOCKS =====

    def _sigma2_block(self, state: ChainState, loglik: Callable[[float], float], current: float):
        if not self.settings.update_sigma2:
            return current
        step = adaptive_rw_step(
            guarded(lambda x: loglik(x) + self.sigma2_prior(x)),
            state.log_sigma2,
            state.adapt.sigma2,
            self.rng,
            current_logpost=current + self.sigma2_prior(state.log_sigma2),
        )
        if step.accepted:
            state.log_sigma2 = step.value
            return step.logpost - self.sigma2_prior(step.value)
        return current


class MwgSampler(BaseSampler):
    """Metropolis-within-Gibbs with site-by-site updates of u"""

    kind = SamplerKind.MWG

    def site_count(self):
        return None if self.stationary else self.data.n

    def iterate(self, state: ChainState) -> ChainState:
        cfg = self.data.spde

        # log sigma2 | z, y
        self._sigma2_block(
            state,
            lambda x: self.latent_loglik(state.z, x),
            self.latent_loglik(state.z, state.log_sigma2),
        )

        # z | u, sigma2, y
        state.z = self.draw_latent(state.u, state.log_sigma2)

        # u_k | u_-k, z, lambda
        if not self.stationary and self.settings.update_length_scales:
            spec = self.spec(state.log_lambda)
            factor = FieldFactor(state.u, cfg)
            sites = state.adapt.sites
            steps = sites.scales * self.rng.standard_normal(cfg.n)
            log_u = np.log(1.0 - self.rng.random(cfg.n))
            accepted = np.zeros(cfg.n, dtype=bool)
            for k in range(cfg.n):
                u_k_new = state.u[k] + steps[k]
                try:
                    field_ratio, proposal = factor.site_logratio(k, u_k_new, state.z)
                    ratio = field_ratio + logratio_u_site(spec, state.u, k, u_k_new)
                except _PROPOSAL_FAILURES as e:
                    self.logger.debug(f"Site {k} proposal rejected: {e}")
                    continue
                if np.isfinite(ratio) and log_u[k] <= ratio:
                    factor.accept(proposal)
                    state.u[k] = u_k_new
                    accepted[k] = True
            sites.record_sweep(accepted)

        # lambda | u (and z under CONST, where u moves with lambda)
        if self.settings.update_lambda:
            if self.stationary:
                target = guarded(
                    lambda x: field_logpdf(state.z, self.constant_field(x), cfg) + self.lambda_prior(x)
                )
                step = adaptive_rw_step(target, state.log_lambda, state.adapt.lam, self.rng)
            else:
                spec_old = self.spec(state.log_lambda)
                target = guarded(
                    lambda x: logratio_lambda(self.spec(x), spec_old, state.u) + self.lambda_prior(x)
                )
                step = adaptive_rw_step(
                    target,
                    state.log_lambda,
                    state.adapt.lam,
                    self.rng,
                    current_logpost=self.lambda_prior(state.log_lambda),
                )
            if step.accepted:
                state.log_lambda = step.value
                if self.stationary:
                    state.u = self.constant_field(step.value)
        return state


class WhitenedEllipticalSampler(BaseSampler):
    """Elliptical slice on zeta with z held through its whitened value xi = L(u) z"""

    kind = SamplerKind.WELLSS

    def prepare(self, state: ChainState) -> ChainState:
        state.xi = build_L(state.u, self.data.spde).matvec(state.z)
        return state

    def _latent_from_xi(self, u: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return solve_banded(build_L(u, self.data.spde), xi)

    def iterate(self, state: ChainState) -> ChainState:
        cfg = self.data.spde

        # log sigma2 | z, y
        loglik_z = self.latent_loglik(state.z, state.log_sigma2)
        loglik_z = self._sigma2_block(state, lambda x: self.latent_loglik(state.z, x), loglik_z)

        # zeta | xi, lambda, sigma2, y
        if not self.stationary and self.settings.update_length_scales:
            spec = self.spec(state.log_lambda)

            def zeta_loglik(zeta):
                u = unwhiten(spec, zeta)
                return self.latent_loglik(self._latent_from_xi(u, state.xi), state.log_sigma2)

            slice_step = ess_slice_step(guarded(zeta_loglik), state.zeta, self.rng, loglik_z)
            state.zeta = slice_step.value
            state.u = unwhiten(spec, state.zeta)
            state.z = self._latent_from_xi(state.u, state.xi)
            loglik_z = slice_step.loglik

        # lambda | zeta, xi, sigma2, y; u and z follow lambda
        if self.settings.update_lambda:

            def lambda_logpost(x):
                u = self.field_from_whitened(state.zeta, x)
                z = self._latent_from_xi(u, state.xi)
                return self.latent_loglik(z, state.log_sigma2) + self.lambda_prior(x)

            step = adaptive_rw_step(
                guarded(lambda_logpost),
                state.log_lambda,
                state.adapt.lam,
                self.rng,
                current_logpost=loglik_z + self.lambda_prior(state.log_lambda),
            )
            if step.accepted:
                state.log_lambda = step.value
                state.u = self.field_from_whitened(state.zeta, step.value)
                state.z = self._latent_from_xi(state.u, state.xi)

        # z | u, sigma2, y, then xi = L(u) z
        state.z = self.draw_latent(state.u, state.log_sigma2)
        state.xi = build_L(state.u, cfg).matvec(state.z)
        return state


class MarginalEllipticalSampler(BaseSampler):
    """Elliptical slice on zeta against log p(y | u, sigma2); z is drawn only when recorded"""

    kind = SamplerKind.MELLSS

    def prepare(self, state: ChainState) -> ChainState:
        state.marginal = self.marginal_loglik(state.u, state.log_sigma2)
        return state

    def recorded_latent(self, state: ChainState) -> np.ndarray:
        state.z = self.draw_latent(state.u, state.log_sigma2)
        return state.z.copy()

    def iterate(self, state: ChainState) -> ChainState:
        # log sigma2 | u, y
        state.marginal = self._sigma2_block(
            state, lambda x: self.marginal_loglik(state.u, x), state.marginal
        )

        # zeta | lambda, sigma2, y
        if not self.stationary and self.settings.update_length_scales:
            spec = self.spec(state.log_lambda)
            slice_step = ess_slice_step(
                guarded(lambda zeta: self.marginal_loglik(unwhiten(spec, zeta), state.log_sigma2)),
                state.zeta,
                self.rng,
                state.marginal,
            )
            state.zeta = slice_step.value
            state.u = unwhiten(spec, state.zeta)
            state.marginal = slice_step.loglik

        # lambda | zeta, sigma2, y
        if self.settings.update_lambda:

            def lambda_logpost(x):
                u = self.field_from_whitened(state.zeta, x)
                return self.marginal_loglik(u, state.log_sigma2) + self.lambda_prior(x)

            step = adaptive_rw_step(
                guarded(lambda_logpost),
                state.log_lambda,
                state.adapt.lam,
                self.rng,
                current_logpost=state.marginal + self.lambda_prior(state.log_lambda),
            )
            if step.accepted:
                state.log_lambda = step.value
                state.u = self.field_from_whitened(state.zeta, step.value)
                state.marginal = step.logpost - self.lambda_prior(step.value)
        return state


SAMPLERS = {
    SamplerKind.MWG: MwgSampler,
    SamplerKind.WELLSS: WhitenedEllipticalSampler,
    SamplerKind.MELLSS: MarginalEllipticalSampler,
}


def make_sampler(
    kind: SamplerKind, data: RegressionData, model: ModelConfig, rng: np.random.Generator
) -> BaseSampler:
    """
    @brief Sampler factory
    @param kind: Sampling scheme
    @param data: Observations and grid
    @param model: Model configuration
    @param rng: Random generator of the chain
    @return BaseSampler: Sampler instance
    """
    return SAMPLERS[SamplerKind(kind)](data, model, rng)


def mwg_iteration(
    state: ChainState, data: RegressionData, model: ModelConfig, rng: np.random.Generator
) -> ChainState:
    """One Metropolis-within-Gibbs sweep"""
    return MwgSampler(data, model, rng).iterate(state)


def wellss_iteration(
    state: ChainState, data: RegressionData, model: ModelConfig, rng: np.random.Generator
) -> ChainState:
    """One whitened elliptical slice sweep (derives state.xi = L(u) z when missing)"""
    sampler = WhitenedEllipticalSampler(data, model, rng)
    if state.xi is None:
        sampler.prepare(state)
    return sampler.iterate(state)


def mellss_iteration(
    state: ChainState, data: RegressionData, model: ModelConfig, rng: np.random.Generator
) -> ChainState:
    """One marginal elliptical slice sweep (refreshes state.marginal when missing)"""
    sampler = MarginalEllipticalSampler(data, model, rng)
    if state.marginal is None:
        sampler.prepare(state)
    return sampler.iterate(state)


__all__ = [
    "guarded",
    "BaseSampler",
    "MwgSampler",
    "WhitenedEllipticalSampler",
    "MarginalEllipticalSampler",
    "SAMPLERS",
    "make_sampler",
    "mwg_iteration",
    "wellss_iteration",
    "mellss_iteration",
]
