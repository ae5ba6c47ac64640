"""Temporal aggregation of raw demand into m-period buckets.

Both schemes sum (never average) ``m`` consecutive observations.  The helpers
accept a :class:`~tempagg.process.DemandSeries`, a 1-D sequence, or a 2-D array
whose last axis is time (rows are treated as independent series).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .process import DemandSeries

__all__ = [
    "Scheme",
    "AggregatedSeries",
    "InsufficientHistoryError",
    "aggregate_non_overlapping",
    "aggregate_overlapping",
    "non_overlapping_sums",
    "overlapping_sums",
    "cumulative_actual",
]


class Scheme(str, Enum):
    NON_OVERLAPPING = "non-overlapping"
    OVERLAPPING = "overlapping"


class InsufficientHistoryError(ValueError):
    """Raised when a series is too short to form the requested buckets."""


@dataclass(frozen=True)
class AggregatedSeries:
    values: np.ndarray
    scheme: Scheme
    m: int
    source_length: int

    def __len__(self) -> int:
        return self.values.shape[-1]


def _as_array(series) -> np.ndarray:
    if isinstance(series, DemandSeries):
        return series.values
    return np.asarray(series, dtype=float)


def _check(n: int, m: int) -> None:
    if m < 1:
        raise ValueError(f"aggregation level must be >= 1, got {m}")
    if n < m:
        raise InsufficientHistoryError(
            f"insufficient history for one bucket: {n} observations, m={m}"
        )


def non_overlapping_sums(values, m: int) -> np.ndarray:
    """Disjoint bucket sums anchored at the newest observation.

    The ``n % m`` oldest observations are dropped. Works on the last axis.
    """
    arr = _as_array(values)
    n = arr.shape[-1]
    _check(n, m)
    count = n // m
    tail = arr[..., n - count * m:]
    return tail.reshape(*arr.shape[:-1], count, m).sum(axis=-1)


def overlapping_sums(values, m: int) -> np.ndarray:
    """Moving-window sums: element ``j`` is ``values[j] + ... + values[j+m-1]``."""
    arr = _as_array(values)
    n = arr.shape[-1]
    _check(n, m)
    return sliding_window_view(arr, m, axis=-1).sum(axis=-1)


def aggregate_non_overlapping(series, m: int) -> AggregatedSeries:
    arr = _as_array(series)
    return AggregatedSeries(
        non_overlapping_sums(arr, m), Scheme.NON_OVERLAPPING, int(m), arr.shape[-1]
    )


def aggregate_overlapping(series, m: int) -> AggregatedSeries:
    arr = _as_array(series)
    return AggregatedSeries(
        overlapping_sums(arr, m), Scheme.OVERLAPPING, int(m), arr.shape[-1]
    )


def cumulative_actual(series, t: int, m: int) -> float:
    """Total demand over periods ``t .. t+m-1``.

    ``t`` is a time index; for a :class:`DemandSeries` it is offset by the
    series' ``origin_index``, for plain sequences it is a 0-based position.
    """
    if m < 1:
        raise ValueError(f"aggregation level must be >= 1, got {m}")
    if isinstance(series, DemandSeries):
        start = t - series.origin_index
        arr = series.values
    else:
        start = t
        arr = np.asarray(series, dtype=float)
    if start < 0 or start + m > arr.shape[-1]:
        raise IndexError(f"periods {t}..{t + m - 1} are not all inside the series")
    return float(arr[start:start + m].sum())
