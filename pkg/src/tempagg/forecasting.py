"""Single exponential smoothing on finite histories and cumulative forecasts.

SES is always initialised at the oldest value of whatever series it runs on
(the first raw observation, or the oldest bucket).  That is the policy the
closed-form MSE expressions assume, so no other initialisation is offered.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .process import DemandSeries
from .transforms import non_overlapping_sums, overlapping_sums

__all__ = [
    "Approach",
    "SesConfig",
    "CumulativeForecast",
    "ses_one_step",
    "ses_explicit",
    "cumulative_forecast",
    "cumulative_forecast_na",
    "cumulative_forecast_noa",
    "cumulative_forecast_oa",
]


class Approach(str, Enum):
    NA = "na"
    NOA = "noa"
    OA = "oa"

    @classmethod
    def parse(cls, value: "Approach | str") -> "Approach":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown approach {value!r}; expected na, noa or oa") from None


@dataclass(frozen=True)
class SesConfig:
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"smoothing constant must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class CumulativeForecast:
    value: float
    approach: Approach
    m: int


def _values(series) -> np.ndarray:
    if isinstance(series, DemandSeries):
        return series.values
    return np.asarray(series, dtype=float)


def _alpha(config: "SesConfig | float") -> float:
    if isinstance(config, SesConfig):
        return config.alpha
    return SesConfig(float(config)).alpha


def ses_one_step(series, config: "SesConfig | float"):
    """One-step-ahead SES forecast after consuming every value of ``series``.

    The level starts at the oldest value and is then updated with each
    observation in turn, oldest first. A 2-D input is smoothed row-wise.
    """
    arr = _values(series)
    if arr.shape[-1] == 0:
        raise ValueError("cannot smooth an empty series")
    alpha = _alpha(config)
    level = arr[..., 0].copy() if arr.ndim > 1 else float(arr[0])
    for j in range(arr.shape[-1]):
        level = alpha * arr[..., j] + (1.0 - alpha) * level
    return level


def ses_explicit(series, config: "SesConfig | float") -> float:
    """Closed-form SES: exponentially decaying weights plus the initial-value term."""
    arr = _values(series)
    if arr.size == 0:
        raise ValueError("cannot smooth an empty series")
    alpha = _alpha(config)
    n = arr.size
    recent_first = arr[::-1]
    weights = alpha * (1.0 - alpha) ** np.arange(n)
    return float(weights @ recent_first + (1.0 - alpha) ** n * arr[0])


def cumulative_forecast_na(series, m: int, config) -> CumulativeForecast:
    """``m`` times the one-step forecast of the raw series."""
    return CumulativeForecast(m * ses_one_step(series, config), Approach.NA, int(m))


def cumulative_forecast_noa(series, m: int, config) -> CumulativeForecast:
    buckets = non_overlapping_sums(_values(series), m)
    return CumulativeForecast(ses_one_step(buckets, config), Approach.NOA, int(m))


def cumulative_forecast_oa(series, m: int, config) -> CumulativeForecast:
    buckets = overlapping_sums(_values(series), m)
    return CumulativeForecast(ses_one_step(buckets, config), Approach.OA, int(m))


_DISPATCH = {
    Approach.NA: cumulative_forecast_na,
    Approach.NOA: cumulative_forecast_noa,
    Approach.OA: cumulative_forecast_oa,
}


def cumulative_forecast(series, m: int, config, approach) -> CumulativeForecast:
    return _DISPATCH[Approach.parse(approach)](series, m, config)
