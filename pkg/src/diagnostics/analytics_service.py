"""
analytics_service.py
Fit reports: ESS per parameter, posterior summaries with credible bands,
MAE and empirical coverage against the noiseless truth, and the separate
timing record with the overall efficiency score.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional

import numpy as np

from config.constants import defaults
from core.exceptions import DegenerateChain
from diagnostics.metrics import credible_band, ec, ess, ess_columns, geweke_z, mae, oes


@dataclass
class FieldSummary:
    """Posterior mean and credible band of a vector quantity"""

    mean: list
    lower: list
    upper: list
    ess_min: Optional[float] = None
    ess_median: Optional[float] = None


@dataclass
class FitReport:
    """Seed-determined summary of a fit (timing lives in the separate timing record)"""

    meta: Dict[str, object]
    n_samples: int
    ess: Dict[str, Optional[float]]
    ess_min: Optional[float]
    fields: Dict[str, FieldSummary]
    geweke: Dict[str, Optional[float]] = field(default_factory=dict)
    acceptance: Dict[str, float] = field(default_factory=dict)
    credible_level: float = defaults.CREDIBLE_LEVEL
    mae: Optional[float] = None
    ec: Optional[float] = None
    ec_grid: Optional[float] = None
    oes: Optional[Dict[str, float]] = None
    timing: Optional[Dict[str, float]] = None

    def to_dict(self) -> Dict[str, object]:
        report = asdict(self)
        return {k: v for k, v in report.items() if v is not None}


class AnalyticsService:
    def __init__(self, level: float = defaults.CREDIBLE_LEVEL):
        self.level = level
        self.logger = logging.getLogger(self.__class__.__name__)

    def _scalar_ess(self, name: str, chain: np.ndarray) -> Optional[float]:
        try:
            return ess(chain)
        except DegenerateChain as e:
            self.logger.warning(f"No ESS for {name}: {e}")
            return None

    def _geweke(self, name: str, chain: np.ndarray) -> Optional[float]:
        try:
            return geweke_z(chain)
        except DegenerateChain:
            return None

    def summarize_field(self, samples: np.ndarray, with_ess: bool = True) -> FieldSummary:
        lower, upper = credible_band(samples, self.level)
        summary = FieldSummary(np.mean(samples, axis=0).tolist(), lower.tolist(), upper.tolist())
        if with_ess and samples.shape[0] >= 10:
            column_ess = ess_columns(samples)
            if np.any(np.isfinite(column_ess)):
                summary.ess_min = float(np.nanmin(column_ess))
                summary.ess_median = float(np.nanmedian(column_ess))
        return summary

    def build_report(
        self,
        meta: Dict[str, object],
        scalars: Dict[str, np.ndarray],
        fields: Dict[str, np.ndarray],
        fitted_samples: Optional[np.ndarray] = None,
        fitted_mean: Optional[np.ndarray] = None,
        truth: Optional[np.ndarray] = None,
        grid_samples: Optional[np.ndarray] = None,
        truth_grid: Optional[np.ndarray] = None,
        acceptance: Optional[Dict[str, float]] = None,
    ) -> FitReport:
        """
        @brief Assemble the report of one chain
        @param meta: Run description (sampler, hyperprior, seed, ...)
        @param scalars: Scalar chains by name (lambda, sigma2, ...)
        @param fields: (samples x coordinates) traces by name (z, ell, ...)
        @param fitted_samples: Posterior draws of the signal at the observation locations
        @param fitted_mean: Posterior mean at the observation locations (defaults to the draws' mean)
        @param truth: Noiseless signal at the observation locations
        @param grid_samples: Draws of the signal at interior grid nodes
        @param truth_grid: Noiseless signal at the same nodes
        @param acceptance: Acceptance rates of the random-walk blocks
        @return FitReport
        """
        scalar_ess = {name: self._scalar_ess(name, np.asarray(chain)) for name, chain in scalars.items()}
        summaries = {name: self.summarize_field(np.asarray(samples)) for name, samples in fields.items()}

        candidates = [v for v in scalar_ess.values() if v is not None]
        candidates += [s.ess_min for s in summaries.values() if s.ess_min is not None]
        n_samples = int(next(iter(scalars.values())).shape[0]) if scalars else 0

        report = FitReport(
            meta=dict(meta),
            n_samples=n_samples,
            ess=scalar_ess,
            ess_min=min(candidates) if candidates else None,
            fields=summaries,
            acceptance=dict(acceptance or {}),
            geweke={name: self._geweke(name, np.asarray(chain)) for name, chain in scalars.items()},
            credible_level=self.level,
        )

        if truth is not None and (fitted_samples is not None or fitted_mean is not None):
            estimate = fitted_mean if fitted_mean is not None else np.mean(fitted_samples, axis=0)
            report.mae = mae(estimate, truth)
            if fitted_samples is not None:
                report.ec = ec(credible_band(fitted_samples, self.level), truth)
        if grid_samples is not None and truth_grid is not None:
            report.ec_grid = ec(credible_band(grid_samples, self.level), truth_grid)

        self.logger.info(
            f"Report: {n_samples} samples, ESS min={report.ess_min}, MAE={report.mae}, EC={report.ec}"
        )
        return report

    def timing_record(self, burnin_seconds: float, sampling_seconds: float, scalar_ess: Dict[str, Optional[float]]) -> Dict[str, object]:
        """Wall-clock split and OES = ESS / total CPU minutes for every scalar with an ESS."""
        total_minutes = (burnin_seconds + sampling_seconds) / 60.0
        scores = {}
        if total_minutes > 0:
            scores = {name: oes(value, total_minutes) for name, value in scalar_ess.items() if value is not None}
        return {
            "burnin_seconds": burnin_seconds,
            "sampling_seconds": sampling_seconds,
            "total_minutes": total_minutes,
            "oes": scores,
        }

    def attach_timing(self, report: FitReport, timing: Dict[str, object]) -> FitReport:
        """Add a stored timing record and recompute OES from this report's ESS."""
        seconds = float(timing.get("burnin_seconds", 0.0)) + float(timing.get("sampling_seconds", 0.0))
        report.timing = {
            "burnin_seconds": float(timing.get("burnin_seconds", 0.0)),
            "sampling_seconds": float(timing.get("sampling_seconds", 0.0)),
        }
        if seconds > 0:
            minutes = seconds / 60.0
            report.oes = {name: oes(v, minutes) for name, v in report.ess.items() if v is not None}
        return report


# Global instance
analytics_service = AnalyticsService()
