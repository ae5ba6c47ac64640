"""Rolling-origin evaluation of the three cumulative-forecast routes on real series.

Input is a long-format CSV (``series_id,period,value``).  Each series is
screened by length, profiled by sample ACF, and then evaluated on every
window of ``n`` observations followed by ``m`` actuals, sliding one period
at a time.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import kernels
from .formatting import write_csv
from .forecasting import Approach, SesConfig
from .oracle import build_error_weights
from .process import ArmaParams, DemandSeries, simulate
from .rules import sample_acf
from .transforms import non_overlapping_sums, overlapping_sums

__all__ = [
    "SeriesDataset",
    "SmoothingPolicy",
    "RollingOriginRow",
    "RollingOriginReport",
    "AcfProfile",
    "SERIES_HEADER",
    "REPORT_HEADER",
    "load_series",
    "write_series",
    "screen_series",
    "acf_profile",
    "rolling_origin_eval",
    "generate_dataset",
    "export_report",
]

SERIES_HEADER = ("series_id", "period", "value")
REPORT_HEADER = (
    "m", "n", "avg_mse_na", "avg_mse_noa", "avg_mse_oa", "ratio_noa_na", "ratio_oa_na",
    "origins_evaluated", "series_count",
)


class SeriesDataset(dict):
    """Mapping of series identifier to :class:`DemandSeries`, kept in insertion order."""


class DatasetError(ValueError):
    pass


def load_series(path) -> SeriesDataset:
    path = Path(path)
    rows: dict[str, list[tuple[int, float]]] = {}
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SERIES_HEADER:
            raise DatasetError(f"{path}: expected header {','.join(SERIES_HEADER)}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != 3:
                raise DatasetError(f"{path}:{lineno}: expected 3 fields, got {len(rec)}")
            sid, period_txt, value_txt = (c.strip() for c in rec)
            try:
                period = int(period_txt)
            except ValueError:
                raise DatasetError(
                    f"{path}:{lineno}: series {sid!r} has non-integer period {period_txt!r}"
                ) from None
            try:
                value = float(value_txt)
            except ValueError:
                value = float("nan")
            if not np.isfinite(value):
                raise DatasetError(
                    f"{path}:{lineno}: series {sid!r} period {period} has missing or non-numeric value {value_txt!r}"
                )
            seen = rows.setdefault(sid, [])
            if seen:
                last = seen[-1][0]
                if period <= last and period >= seen[0][0]:
                    raise DatasetError(f"{path}:{lineno}: duplicate entry for series {sid!r} period {period}")
                if period != last + 1:
                    raise DatasetError(
                        f"{path}:{lineno}: series {sid!r} period {period} does not follow {last} "
                        "(periods must increase by one)"
                    )
            seen.append((period, value))

    dataset = SeriesDataset()
    for sid, obs in rows.items():
        dataset[sid] = DemandSeries(np.array([v for _, v in obs]), origin_index=obs[0][0])
    if not dataset:
        warnings.warn(f"{path}: no data rows; dataset is empty", stacklevel=2)
    return dataset


def write_series(dataset: Mapping[str, DemandSeries], path) -> None:
    def rows():
        for sid, series in dataset.items():
            for offset, value in enumerate(series.values):
                yield sid, series.origin_index + offset, float(value)

    write_csv(path, SERIES_HEADER, rows())


def screen_series(dataset: Mapping[str, DemandSeries], min_len: int = 320, max_len: int = 500) -> SeriesDataset:
    """Drop series shorter than ``min_len``; keep only the newest ``max_len`` observations."""
    if min_len > max_len:
        raise ValueError("min_len must not exceed max_len")
    out = SeriesDataset()
    for sid, series in dataset.items():
        size = len(series)
        if size < min_len:
            continue
        if size > max_len:
            cut = size - max_len
            series = DemandSeries(series.values[cut:], series.origin_index + cut)
        out[sid] = series
    return out


@dataclass(frozen=True)
class AcfProfile:
    lags: tuple[int, ...]
    values: np.ndarray          # shape (series, lags)
    series_ids: tuple[str, ...]
    skipped: tuple[str, ...]

    def quartiles(self) -> np.ndarray:
        """Per-lag (min, q1, median, q3, max), shape (lags, 5)."""
        if self.values.size == 0:
            return np.full((len(self.lags), 5), np.nan)
        return np.percentile(self.values, [0, 25, 50, 75, 100], axis=0).T


def acf_profile(dataset: Mapping[str, DemandSeries], max_lag: int = 12) -> AcfProfile:
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    rows, ids, skipped = [], [], []
    for sid, series in dataset.items():
        if len(series) <= max_lag:
            warnings.warn(f"series {sid!r} too short for {max_lag} lags; skipped", stacklevel=2)
            skipped.append(sid)
            continue
        try:
            rows.append(sample_acf(series.values, max_lag))
        except ValueError:
            warnings.warn(f"series {sid!r} is constant; autocorrelation undefined, skipped", stacklevel=2)
            skipped.append(sid)
            continue
        ids.append(sid)
    values = np.array(rows) if rows else np.empty((0, max_lag))
    return AcfProfile(tuple(range(1, max_lag + 1)), values, tuple(ids), tuple(skipped))


@dataclass(frozen=True)
class SmoothingPolicy:
    """``fit-insample`` picks per window the grid constant with least one-step SSE;
    ``fixed`` uses one constant everywhere."""

    kind: str = "fit-insample"
    value: float | None = None
    grid: tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 21))

    def __post_init__(self) -> None:
        if self.kind not in ("fit-insample", "fixed"):
            raise ValueError(f"unknown smoothing policy {self.kind!r}")
        if self.kind == "fixed":
            if self.value is None:
                raise ValueError("fixed policy needs a value")
            SesConfig(self.value)
        for a in self.grid:
            SesConfig(a)

    @classmethod
    def parse(cls, text: str) -> "SmoothingPolicy":
        text = text.strip()
        if text == "fit-insample":
            return cls()
        if text.startswith("fixed(") and text.endswith(")"):
            return cls("fixed", float(text[6:-1]))
        try:
            return cls("fixed", float(text))
        except ValueError:
            raise ValueError(f"cannot parse smoothing policy {text!r}") from None

    def alphas(self) -> np.ndarray:
        if self.kind == "fixed":
            return np.array([float(self.value)])
        return np.array(self.grid, dtype=float)


@dataclass(frozen=True)
class RollingOriginRow:
    m: int
    n: int
    avg_mse_na: float
    avg_mse_noa: float
    avg_mse_oa: float
    ratio_noa_na: float
    ratio_oa_na: float
    origins_evaluated: int
    series_count: int
    degenerate_windows: int = 0

    def as_csv_row(self) -> tuple:
        return (
            self.m, self.n, self.avg_mse_na, self.avg_mse_noa, self.avg_mse_oa,
            self.ratio_noa_na, self.ratio_oa_na, self.origins_evaluated, self.series_count,
        )


@dataclass
class RollingOriginReport:
    rows: list[RollingOriginRow] = field(default_factory=list)
    skipped: dict[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)

    def row(self, m: int, n: int) -> RollingOriginRow:
        for r in self.rows:
            if r.m == m and r.n == n:
                return r
        raise KeyError((m, n))


def _fit(windows: np.ndarray, alphas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return kernels.ses_fit_windows(np.ascontiguousarray(windows, dtype=float), alphas)


def _series_errors(values: np.ndarray, n: int, m: int, alphas: np.ndarray):
    """Squared errors per origin for NA, NOA, OA plus the chosen constants."""
    blocks = sliding_window_view(values, n + m)
    history, future = blocks[:, :n], blocks[:, n:]
    actual = future.sum(axis=1)
    f_na, a_na = _fit(history, alphas)
    f_noa, a_noa = _fit(non_overlapping_sums(history, m), alphas)
    f_oa, a_oa = _fit(overlapping_sums(history, m), alphas)
    errors = np.stack([actual - m * f_na, actual - f_noa, actual - f_oa], axis=1)
    chosen = np.stack([a_na, a_noa, a_oa], axis=1)
    return errors, chosen


def _verify_windows(values, n, m, errors, chosen, rng, count) -> None:
    """Re-derive a few recorded errors from the oracle's weight vectors."""
    origins = errors.shape[0]
    picks = rng.choice(origins, size=min(count, origins), replace=False)
    for o in picks:
        window = values[o:o + n + m]
        scale = max(1.0, float(np.abs(window).max()))
        for k, approach in enumerate((Approach.NA, Approach.NOA, Approach.OA)):
            w = build_error_weights(approach, n, m, float(chosen[o, k])).weights
            expected = float(w @ window)
            if abs(expected - errors[o, k]) > 1e-9 * scale * (n + m):
                raise RuntimeError(
                    f"forecast error mismatch at origin {o} ({approach.name}): "
                    f"{errors[o, k]!r} vs weight expansion {expected!r}"
                )


def rolling_origin_eval(
    dataset: Mapping[str, DemandSeries],
    n: int | Sequence[int],
    m: int | Sequence[int],
    smoothing_policy: SmoothingPolicy | None = None,
    verify_windows: int = 10,
    seed: int = 0,
) -> RollingOriginReport:
    """Average squared errors over origins per series, then over series.

    ``n`` and ``m`` may be single values or sequences; one report row per
    (m, n).  ``verify_windows`` random windows per series and row are checked
    against the oracle weight expansion.
    """
    policy = smoothing_policy or SmoothingPolicy()
    alphas = policy.alphas()
    n_values = [int(n)] if np.isscalar(n) else [int(v) for v in n]
    m_values = [int(m)] if np.isscalar(m) else [int(v) for v in m]
    rng = np.random.default_rng(seed)
    report = RollingOriginReport()
    for m_ in sorted(m_values):
        for n_ in sorted(n_values):
            if n_ < m_:
                raise ValueError(f"history length n={n_} shorter than m={m_}")
            per_series, origins, degenerate, skipped = [], 0, 0, []
            for sid, series in dataset.items():
                values = series.values
                if values.size < n_ + m_:
                    warnings.warn(
                        f"series {sid!r} (length {values.size}) too short for n={n_}, m={m_}; skipped",
                        stacklevel=2,
                    )
                    skipped.append(sid)
                    continue
                errors, chosen = _series_errors(values, n_, m_, alphas)
                if verify_windows:
                    _verify_windows(values, n_, m_, errors, chosen, rng, verify_windows)
                sq = errors * errors
                per_series.append(sq.mean(axis=0))
                origins += sq.shape[0]
                degenerate += int(np.sum(np.all(sq == 0.0, axis=1)))
            if not per_series:
                report.skipped[(m_, n_)] = tuple(skipped)
                continue
            avg = np.mean(np.array(per_series), axis=0)
            na, noa, oa = (float(v) for v in avg)
            report.rows.append(
                RollingOriginRow(
                    m_, n_, na, noa, oa, _ratio(noa, na), _ratio(oa, na),
                    origins, len(per_series), degenerate,
                )
            )
            report.skipped[(m_, n_)] = tuple(skipped)
    return report


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        # all-zero errors (constant data): the routes tie by convention
        return 1.0 if num == 0.0 else float("inf")
    return num / den


def export_report(report: RollingOriginReport, path) -> None:
    write_csv(path, REPORT_HEADER, (r.as_csv_row() for r in sorted(report.rows, key=lambda r: (r.m, r.n))))


def generate_dataset(
    params: ArmaParams, count: int = 50, length: int = 400, seed: int = 0, burn_in: int = 500
) -> SeriesDataset:
    """Synthetic stand-in dataset: series ``k`` is simulated with seed ``seed + k``."""
    if count < 1 or length < 1:
        raise ValueError("count and length must be positive")
    width = max(4, len(str(count)))
    out = SeriesDataset()
    for k in range(count):
        s = simulate(params, length, seed + k, burn_in=burn_in)
        out[f"S{k + 1:0{width}d}"] = DemandSeries(s.values, origin_index=1)
    return out
