"""Autocorrelation-structure classes and the aggregate-or-not recommendation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .process import ArmaParams, DemandSeries

__all__ = [
    "AcfClass",
    "Recommendation",
    "RecommendedApproach",
    "classify_params",
    "classify_series",
    "sample_acf",
    "recommend",
]


class AcfClass(str, Enum):
    NEGATIVE = "negative"
    OSCILLATING = "oscillating"
    POSITIVE = "positive"
    WHITE_NOISE = "white_noise"


class RecommendedApproach(str, Enum):
    ORIGINAL = "use_original_series"
    OVERLAPPING = "use_overlapping_ta"
    EITHER = "use_either_ta"


@dataclass(frozen=True)
class Recommendation:
    approach: RecommendedApproach
    rationale: str


def classify_params(params: ArmaParams, tol: float = 1e-9) -> AcfClass:
    """Classify the theoretical ACF of an ARMA(1,1) by sign structure.

    Lags beyond one follow rho_k = phi**(k-1) * rho_1, so the sign of rho_1
    and the sign of phi decide everything.  With phi == 0 only lag one is
    non-zero and its sign picks positive/negative.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    phi, theta = params.phi, params.theta
    if abs(phi - theta) <= tol:
        return AcfClass.WHITE_NOISE
    rho1_sign = np.sign((phi - theta) * (1.0 - phi * theta))
    if phi < 0.0:
        return AcfClass.OSCILLATING
    return AcfClass.POSITIVE if rho1_sign > 0 else AcfClass.NEGATIVE


def sample_acf(values, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags ``1..max_lag`` (biased, full-sample mean)."""
    x = np.asarray(values.values if isinstance(values, DemandSeries) else values, dtype=float)
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if x.size <= max_lag:
        raise ValueError(f"series of length {x.size} too short for max_lag={max_lag}")
    dev = x - x.mean()
    denom = float(dev @ dev)
    if denom <= 0.0 or not np.isfinite(denom):
        raise ValueError("autocorrelation undefined for a constant series")
    n = x.size
    return np.array([dev[: n - k] @ dev[k:] / denom for k in range(1, max_lag + 1)])


def classify_series(series, max_lag: int = 12) -> AcfClass:
    """Empirical analogue of :func:`classify_params` from sample autocorrelations.

    Reads the leading run of lags outside the +/-1.96/sqrt(N) band, stopping
    at the first lag inside it: the theoretical ACF decays geometrically, so
    once it has entered the band later crossings are sampling noise.  An
    insignificant lag one means white noise; both signs in the run mean
    oscillating; otherwise the common sign decides.
    """
    x = series.values if isinstance(series, DemandSeries) else np.asarray(series, dtype=float)
    acf = sample_acf(x, max_lag)
    band = 1.96 / np.sqrt(x.size)
    inside = np.abs(acf) <= band
    run = acf[: int(np.argmax(inside))] if inside.any() else acf
    pos = bool(np.any(run > 0))
    neg = bool(np.any(run < 0))
    if pos and neg:
        return AcfClass.OSCILLATING
    if pos:
        return AcfClass.POSITIVE
    if neg:
        return AcfClass.NEGATIVE
    return AcfClass.WHITE_NOISE


_RULES = {
    AcfClass.WHITE_NOISE: Recommendation(
        RecommendedApproach.EITHER,
        "No autocorrelation: forecast from an aggregated series; overlapping and "
        "non-overlapping buckets do equally well.",
    ),
    AcfClass.NEGATIVE: Recommendation(
        RecommendedApproach.OVERLAPPING,
        "Autocorrelation is not positive at all lags: forecast from the overlapping "
        "(moving-window) aggregate. A pure MA(1) with negative lag-1 correlation lands here.",
    ),
    AcfClass.OSCILLATING: Recommendation(
        RecommendedApproach.OVERLAPPING,
        "Autocorrelation alternates in sign across lags: forecast from the overlapping "
        "(moving-window) aggregate.",
    ),
    AcfClass.POSITIVE: Recommendation(
        RecommendedApproach.ORIGINAL,
        "Autocorrelation is positive at all lags: forecast from the original series. "
        "A pure MA(1) with positive lag-1 correlation lands here.",
    ),
}


def recommend(acf_class: AcfClass) -> Recommendation:
    return _RULES[AcfClass(acf_class)]
