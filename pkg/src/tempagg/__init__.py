"""Forecast accuracy of SES on raw, non-overlapping and overlapping aggregated ARMA(1,1) demand."""

from .analytical import MseQuery, MseResult, mse, optimize_smoothing
from .forecasting import Approach, SesConfig
from .kernels import BACKEND
from .process import ArmaParams, DemandSeries, simulate
from .rules import AcfClass, classify_params, recommend

__version__ = "0.1.0"

__all__ = [
    "AcfClass",
    "Approach",
    "ArmaParams",
    "BACKEND",
    "DemandSeries",
    "MseQuery",
    "MseResult",
    "SesConfig",
    "classify_params",
    "mse",
    "optimize_smoothing",
    "recommend",
    "simulate",
]
