"""ARMA(1,1) demand process: parameters, exact autocovariances and simulation.

The process is

    d_t = C + e_t + phi * d_{t-1} - theta * e_{t-1},   e_t ~ N(0, sigma2)

Aggregated autocovariances are returned for both bucketing schemes so the
analytical MSE code never has to re-derive them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "ArmaParams",
    "DemandSeries",
    "autocovariance",
    "autocovariances",
    "autocorrelation",
    "geometric_sum",
    "noa_variance",
    "noa_autocovariance",
    "oa_autocovariance",
    "oa_autocovariances",
    "aggregate_demand_cross_cov",
    "simulate",
    "simulate_paths",
]

# |phi| must stay this far from 1; every 1 - phi**2 denominator depends on it.
PHI_MARGIN = 1e-9
DEFAULT_BURN_IN = 500


@dataclass(frozen=True)
class ArmaParams:
    """Parameters of a stationary, invertible ARMA(1,1) process.

    Attributes:
        phi: Autoregressive coefficient, strictly inside (-1, 1).
        theta: Moving-average coefficient (subtracted convention), inside (-1, 1).
        sigma2: Innovation variance, positive.
        c: Level constant. Mean demand is ``c / (1 - phi)``.
    """

    phi: float
    theta: float
    sigma2: float = 1.0
    c: float = 0.0

    def __post_init__(self) -> None:
        for name in ("phi", "theta", "sigma2", "c"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if abs(self.phi) >= 1.0 - PHI_MARGIN:
            raise ValueError(f"|phi| must be < 1 (stationarity), got phi={self.phi}")
        if abs(self.theta) >= 1.0:
            raise ValueError(f"|theta| must be < 1 (invertibility), got theta={self.theta}")
        if self.sigma2 <= 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def mean(self) -> float:
        return self.c / (1.0 - self.phi)

    @property
    def gamma0(self) -> float:
        # (1 - 2 phi theta + theta^2) / (1 - phi^2), rearranged so phi == theta gives sigma2 exactly
        phi, theta = self.phi, self.theta
        return (1.0 + (phi - theta) ** 2 / (1.0 - phi * phi)) * self.sigma2

    @property
    def gamma1(self) -> float:
        phi, theta = self.phi, self.theta
        return (phi - theta) * (1.0 - phi * theta) / (1.0 - phi * phi) * self.sigma2


@dataclass(frozen=True)
class DemandSeries:
    """A finite, ordered run of demand observations.

    ``origin_index`` is the time index of ``values[0]``; indexing by time
    (``series.at(t)``) subtracts it.
    """

    values: np.ndarray
    origin_index: int = 0

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("DemandSeries values must be one-dimensional")
        if arr.size == 0:
            raise ValueError("DemandSeries must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("DemandSeries values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def at(self, t: int) -> float:
        pos = t - self.origin_index
        if not 0 <= pos < self.values.size:
            raise IndexError(f"time index {t} outside series span")
        return float(self.values[pos])


def _check_lag(k: int) -> int:
    k = int(k)
    if k < 0:
        raise ValueError(f"lag must be non-negative, got {k}")
    return k


def _check_level(m: int) -> int:
    m = int(m)
    if m < 1:
        raise ValueError(f"aggregation level must be >= 1, got {m}")
    return m


def geometric_sum(phi: float, m: int) -> float:
    """Return 1 + phi + ... + phi**(m-1), i.e. (1 - phi**m)/(1 - phi) without the 0/0."""
    total = 0.0
    term = 1.0
    for _ in range(m):
        total += term
        term *= phi
    return total


def autocovariance(params: ArmaParams, k: int) -> float:
    """Lag-``k`` autocovariance of the raw process."""
    k = _check_lag(k)
    if k == 0:
        return params.gamma0
    return params.phi ** (k - 1) * params.gamma1


def autocovariances(params: ArmaParams, max_lag: int) -> np.ndarray:
    """Autocovariances for lags ``0..max_lag`` as an array."""
    max_lag = _check_lag(max_lag)
    out = np.empty(max_lag + 1)
    out[0] = params.gamma0
    if max_lag >= 1:
        out[1:] = params.gamma1 * params.phi ** np.arange(max_lag)
    return out


def autocorrelation(params: ArmaParams, k: int) -> float:
    k = _check_lag(k)
    if k < 1:
        raise ValueError("autocorrelation is defined here for lags >= 1")
    return autocovariance(params, k) / params.gamma0


def noa_variance(params: ArmaParams, m: int) -> float:
    """Variance of a sum of ``m`` consecutive observations."""
    m = _check_level(m)
    acc = 0.0
    for k in range(1, m):
        acc += 2.0 * (m - k) * params.phi ** (k - 1)
    return m * params.gamma0 + params.gamma1 * acc


def noa_autocovariance(params: ArmaParams, m: int, k: int) -> float:
    """Autocovariance at bucket lag ``k >= 1`` of the non-overlapping aggregate."""
    m = _check_level(m)
    k = _check_lag(k)
    if k < 1:
        raise ValueError("use noa_variance for lag 0")
    g = geometric_sum(params.phi, m)
    return params.phi ** (m * (k - 1)) * params.gamma1 * g * g


def oa_autocovariance(params: ArmaParams, m: int, k: int) -> float:
    """Autocovariance at lag ``k >= 0`` of the overlapping (moving-window) aggregate.

    Windows ``k`` periods apart share ``max(m - k, 0)`` observations; the value
    is the double sum of raw autocovariances over both windows.
    """
    m = _check_level(m)
    k = _check_lag(k)
    total = 0.0
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            total += autocovariance(params, abs(k + j - i))
    return total


def oa_autocovariances(params: ArmaParams, m: int, max_lag: int) -> np.ndarray:
    """Overlapping-aggregate autocovariances for lags ``0..max_lag``.

    Uses the triangular-kernel form sum_d (m - |d|) * gamma_{|k + d|}, which is
    the same double sum grouped by offset.
    """
    m = _check_level(m)
    max_lag = _check_lag(max_lag)
    gam = autocovariances(params, max_lag + m)
    d = np.arange(-(m - 1), m)
    weights = (m - np.abs(d)).astype(float)
    k = np.arange(max_lag + 1)[:, None]
    return (weights * gam[np.abs(k + d)]).sum(axis=1)


def aggregate_demand_cross_cov(params: ArmaParams, m: int, k: int) -> float:
    """Covariance between the next ``m``-period total and the observation ``k`` periods back."""
    m = _check_level(m)
    k = _check_lag(k)
    if k < 1:
        raise ValueError("cross covariance is defined for k >= 1")
    return params.phi ** (k - 1) * params.gamma1 * geometric_sum(params.phi, m)


def simulate_paths(
    params: ArmaParams,
    length: int,
    n_paths: int,
    rng: np.random.Generator,
    burn_in: int = DEFAULT_BURN_IN,
) -> np.ndarray:
    """Simulate ``n_paths`` independent paths, shape ``(n_paths, length)``.

    Each path starts at the process mean with a zero lagged innovation; the
    first ``burn_in`` periods are discarded.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be non-negative")
    total = length + burn_in
    eps = rng.standard_normal((n_paths, total)) * np.sqrt(params.sigma2)
    # Deviation from the mean: x_t = phi x_{t-1} + e_t - theta e_{t-1}, x_0 = e_0 = 0.
    x = lfilter([1.0, -params.theta], [1.0, -params.phi], eps, axis=-1)
    return params.mean + x[:, burn_in:]


def simulate(
    params: ArmaParams,
    length: int,
    seed: int,
    burn_in: int = DEFAULT_BURN_IN,
) -> DemandSeries:
    """Simulate one stationary series; identical seeds give identical output."""
    rng = np.random.default_rng(seed)
    path = simulate_paths(params, length, 1, rng, burn_in=burn_in)[0]
    return DemandSeries(path, origin_index=0)
