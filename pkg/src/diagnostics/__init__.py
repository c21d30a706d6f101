# diagnostics package

from .metrics import autocovariance, ess, ess_columns, geweke_z, oes, mae, credible_band, ec
from .analytics_service import FieldSummary, FitReport, AnalyticsService, analytics_service

__all__ = [
    "autocovariance",
    "ess",
    "ess_columns",
    "geweke_z",
    "oes",
    "mae",
    "credible_band",
    "ec",
    "FieldSummary",
    "FitReport",
    "AnalyticsService",
    "analytics_service",
]
