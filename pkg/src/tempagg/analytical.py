"""Exact finite-history MSE of the cumulative m-period SES forecast.

Three forecasting routes are covered:

* ``NA``  - smooth the raw series, multiply the one-step forecast by ``m``;
* ``NOA`` - smooth disjoint m-period bucket sums (newest-anchored);
* ``OA``  - smooth overlapping m-period window sums.

Every MSE is assembled from three pieces, ``var(D) + var(F) - 2 cov(D, F)``,
each available on its own (``var_forecast_*``, ``cov_*``).  The assembled
value is the source of truth.  ``flattened_mse`` evaluates the fully
expanded single-expression form as an independent cross-check, and
``printed_mse`` evaluates the expanded expressions exactly as they are
commonly typeset, which carry transcription slips and are kept only so the
discrepancy can be measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .forecasting import Approach, SesConfig
from .process import (
    ArmaParams,
    geometric_sum,
    noa_variance,
    oa_autocovariances,
)

__all__ = [
    "MseQuery",
    "MseResult",
    "var_forecast_na",
    "cov_demand_forecast_na",
    "var_forecast_noa",
    "cov_noa",
    "var_forecast_oa",
    "cov_oa",
    "mse_na",
    "mse_noa",
    "mse_oa",
    "mse",
    "mse_grid",
    "flattened_mse",
    "printed_mse",
    "smoothing_grid",
    "optimize_smoothing",
]


@dataclass(frozen=True)
class MseQuery:
    params: ArmaParams
    n: int
    m: int
    smoothing: float
    approach: Approach = Approach.NA

    def __post_init__(self) -> None:
        object.__setattr__(self, "approach", Approach.parse(self.approach))
        SesConfig(self.smoothing)
        if self.m < 1:
            raise ValueError(f"aggregation level must be >= 1, got {self.m}")
        if self.n < 1:
            raise ValueError(f"history length must be >= 1, got {self.n}")
        if self.approach is not Approach.NA and self.n < self.m:
            raise ValueError(
                f"{self.approach.name} needs at least m={self.m} observations, got n={self.n}"
            )


@dataclass(frozen=True)
class MseResult:
    mse: float
    var_demand: float
    var_forecast: float
    cov_demand_forecast: float


def _ses_variance(c0: float, lag_cov, length: int, beta: float) -> float:
    """Variance of an SES forecast over ``length`` inputs with first-value start.

    ``lag_cov(i)`` is the covariance between inputs ``i`` positions apart.
    Terms: the weighted diagonal, the initial value paired with the oldest
    input it duplicates, cross terms within the weighted sum, and cross terms
    between the initial value and the newer inputs.
    """
    q = 1.0 - beta
    total = (
        beta * c0 * (1.0 - q ** (2 * length)) / (2.0 - beta)
        + 2.0 * beta * q ** (2 * length - 1) * c0
        + q ** (2 * length) * c0
    )
    within = 0.0
    with_init = 0.0
    for i in range(1, length):
        within += q**i * lag_cov(i) * (1.0 - q ** (2 * (length - i)))
        with_init += q ** (length + i - 1) * lag_cov(length - i)
    return total + 2.0 * beta / (2.0 - beta) * within + 2.0 * beta * with_init


def var_forecast_na(params: ArmaParams, n: int, alpha: float) -> float:
    """Variance of the raw-series SES forecast built from ``n`` observations."""
    SesConfig(alpha)
    phi, g1 = params.phi, params.gamma1
    return _ses_variance(params.gamma0, lambda i: g1 * phi ** (i - 1), n, alpha)


def cov_demand_forecast_na(params: ArmaParams, n: int, m: int, alpha: float) -> float:
    """Covariance of the next-``m`` total with the raw-series SES forecast."""
    SesConfig(alpha)
    phi, g1 = params.phi, params.gamma1
    q = 1.0 - alpha
    g = geometric_sum(phi, m)
    r = phi * q
    return alpha * g1 * g * (1.0 - r**n) / (1.0 - r) + q**n * phi ** (n - 1) * g1 * g


def _noa_buckets(n: int, m: int) -> int:
    buckets = n // m
    if buckets < 1:
        raise ValueError(f"need at least one full bucket: n={n}, m={m}")
    return buckets


def var_forecast_noa(params: ArmaParams, n: int, m: int, beta: float) -> float:
    """Variance of the SES forecast run on ``n // m`` disjoint bucket sums."""
    SesConfig(beta)
    buckets = _noa_buckets(n, m)
    phi, g1 = params.phi, params.gamma1
    g2 = geometric_sum(phi, m) ** 2
    return _ses_variance(
        noa_variance(params, m), lambda i: phi ** (m * (i - 1)) * g1 * g2, buckets, beta
    )


def cov_noa(params: ArmaParams, n: int, m: int, beta: float) -> float:
    """Covariance of the next-``m`` total with its non-overlapping SES forecast."""
    SesConfig(beta)
    buckets = _noa_buckets(n, m)
    phi_m = params.phi**m
    q = 1.0 - beta
    lead = params.gamma1 * geometric_sum(params.phi, m) ** 2
    r = phi_m * q
    return beta * lead * (1.0 - r**buckets) / (1.0 - r) + phi_m ** (buckets - 1) * q**buckets * lead


def _oa_windows(n: int, m: int) -> int:
    windows = n - m + 1
    if windows < 1:
        raise ValueError(f"need at least one full window: n={n}, m={m}")
    return windows


def var_forecast_oa(params: ArmaParams, n: int, m: int, beta: float) -> float:
    """Variance of the SES forecast run on the ``n - m + 1`` moving-window sums."""
    SesConfig(beta)
    windows = _oa_windows(n, m)
    gam = oa_autocovariances(params, m, windows)
    return _ses_variance(float(gam[0]), lambda i: float(gam[i]), windows, beta)


def cov_oa(params: ArmaParams, n: int, m: int, beta: float) -> float:
    """Covariance of the next-``m`` total with its overlapping SES forecast."""
    SesConfig(beta)
    windows = _oa_windows(n, m)
    phi = params.phi
    q = 1.0 - beta
    lead = params.gamma1 * geometric_sum(phi, m) ** 2
    r = phi * q
    return beta * lead * (1.0 - r**windows) / (1.0 - r) + q**windows * phi ** (windows - 1) * lead


def mse_na(query: MseQuery) -> MseResult:
    p, n, m, a = query.params, query.n, query.m, query.smoothing
    var_d = noa_variance(p, m)
    var_f = var_forecast_na(p, n, a)
    cov = cov_demand_forecast_na(p, n, m, a)
    # The forecast is m * f, so its variance and covariance scale by m^2 and m.
    return MseResult(var_d + m * m * var_f - 2.0 * m * cov, var_d, m * m * var_f, m * cov)


def mse_noa(query: MseQuery) -> MseResult:
    p, n, m, b = query.params, query.n, query.m, query.smoothing
    var_d = noa_variance(p, m)
    var_f = var_forecast_noa(p, n, m, b)
    cov = cov_noa(p, n, m, b)
    return MseResult(var_d + var_f - 2.0 * cov, var_d, var_f, cov)


def mse_oa(query: MseQuery) -> MseResult:
    p, n, m, b = query.params, query.n, query.m, query.smoothing
    var_d = noa_variance(p, m)
    var_f = var_forecast_oa(p, n, m, b)
    cov = cov_oa(p, n, m, b)
    return MseResult(var_d + var_f - 2.0 * cov, var_d, var_f, cov)


_MSE = {Approach.NA: mse_na, Approach.NOA: mse_noa, Approach.OA: mse_oa}


def mse(query: MseQuery) -> MseResult:
    return _MSE[query.approach](query)


# -- expanded single-expression forms ---------------------------------------


def _pair_terms(gamma0: float, gamma1: float, phi: float, m: int, lag: int) -> float:
    """Sum over both m-windows of raw covariances, split by |offset| = 0, 1, >1."""
    zero = one = rest = 0.0
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            d = abs(lag + j - i)
            if d == 0:
                zero += gamma0
            elif d == 1:
                one += gamma1
            else:
                rest += phi ** (d - 1) * gamma1
    return zero + one + rest


def flattened_mse(query: MseQuery) -> float:
    """Fully expanded MSE in terms of gamma_0, gamma_1 and phi only.

    Written independently of the building blocks above; sums are explicit and
    the bucket count for NOA is ``n // m`` throughout.
    """
    p, n, m, a = query.params, query.n, query.m, query.smoothing
    g0, g1, phi = p.gamma0, p.gamma1, p.phi
    q = 1.0 - a
    var_d = m * g0 + g1 * sum(2 * (m - k) * phi ** (k - 1) for k in range(1, m))
    g = (1.0 - phi**m) / (1.0 - phi)

    if query.approach is Approach.NA:
        var_f = (
            a * g0 * (1 - q ** (2 * n)) / (2 - a)
            + 2 * a * q ** (2 * n - 1) * g0
            + q ** (2 * n) * g0
            + 2 * a * g1 / (2 - a)
            * sum(q**i * phi ** (i - 1) * (1 - q ** (2 * (n - i))) for i in range(1, n))
            + sum(2 * a * phi ** (n - i - 1) * q ** (n + i - 1) * g1 for i in range(1, n))
        )
        cov = (
            a * g1 * (1 - phi**m) / ((1 - phi) * (1 - phi + a * phi)) * (1 - (phi - a * phi) ** n)
            + q**n * phi ** (n - 1) * g1 * g
        )
        return var_d + m * m * var_f - 2 * m * cov

    if query.approach is Approach.NOA:
        big = n // m
        pm = phi**m
        var_f = (
            var_d * (a * (1 - q ** (2 * big)) / (2 - a) + q ** (2 * big) + 2 * a * q ** (2 * big - 1))
            + sum(
                2 * a * g1 / (2 - a) * g * g * q**i * phi ** (m * (i - 1)) * (1 - q ** (2 * (big - i)))
                for i in range(1, big)
            )
            + 2 * a * g1 * g * g * sum(q ** (big + i - 1) * phi ** (m * (big - i - 1)) for i in range(1, big))
        )
        cov = a * g1 * g * g * (1 - (pm - a * pm) ** big) / (1 - pm + a * pm) + pm ** (big - 1) * q**big * g * g * g1
        return var_d + var_f - 2 * cov

    big = n - m + 1
    var_f = (
        var_d * (a * (1 - (q * q) ** big) / (2 - a) + 2 * a * q ** (2 * (n - m) + 1) + q ** (2 * big))
        + 2 * a / (2 - a)
        * sum(q**k * _pair_terms(g0, g1, phi, m, k) * (1 - q ** (2 * (big - k))) for k in range(1, n - m + 1))
        + 2 * a * sum(q ** (n - m + k) * _pair_terms(g0, g1, phi, m, n - m - k + 1) for k in range(1, n - m + 1))
    )
    cov = a * g1 * g * g * (1 - (phi * q) ** big) / (1 - phi + phi * a) + q**big * phi ** (n - m) * g * g * g1
    return var_d + var_f - 2 * cov


def printed_mse(query: MseQuery) -> float:
    """Evaluate the expanded MSE expressions literally as typeset.

    Known differences from the correct value: the NA form omits the factor
    ``m`` (and the sign/2 on the initial-value term) in the covariance part;
    the NOA form uses ceil(n/m), a ``2C - i`` exponent and drops one cross-term
    sum; the OA form drops the initial-value terms and the trailing sum.
    """
    p, n, m, a = query.params, query.n, query.m, query.smoothing
    g0, g1, phi = p.gamma0, p.gamma1, p.phi
    q = 1.0 - a
    var_d = m * g0 + g1 * sum(2 * (m - k) * phi ** (k - 1) for k in range(1, m))
    g = geometric_sum(phi, m)

    if query.approach is Approach.NA:
        var_f = (
            a * g0 * (1 - q ** (2 * n)) / (2 - a)
            + 2 * a * q ** (2 * n - 1) * g0
            + q ** (2 * n) * g0
            + 2 * a * g1 / (2 - a)
            * sum(q**i * phi ** (i - 1) * (1 - q ** (2 * (n - i))) for i in range(1, n))
            + sum(2 * a * phi ** (n - i - 1) * q ** (n + i - 1) * g1 for i in range(1, n))
        )
        return (
            var_d
            + m * m * var_f
            - 2 * a * g1 * g / (1 - phi + a * phi) * (1 - (phi - a * phi) ** n)
            + q**n * phi ** (n - 1) * g1 * g
        )

    if query.approach is Approach.NOA:
        c = math.ceil(n / m)
        pm = phi**m
        return (
            var_d * (a * (1 - q ** (2 * c)) / (2 - a) + q ** (2 * c) + 2 * a * q ** (2 * c - 1))
            + var_d
            + sum(
                2 * a * g1 / (2 - a) * g * g * q**i * phi ** (m * (i - 1)) * (1 - q ** (2 * c - i))
                for i in range(1, c)
            )
            - 2
            * (
                a * g1 * g * g * (1 - (pm - a * pm) ** c) / (1 - pm + a * pm)
                + phi ** (m * (c - 1)) * q ** (2 * c) * g * g * g1
            )
        )

    big = n - m + 1
    slip_var = m * g0 + 2 * g1 * sum((m - i) * phi for i in range(1, m))
    return (
        var_d
        + a * slip_var * (1 - (q * q) ** big) / (2 - a)
        - 2 * a * g1 * g * g * (1 - (phi * q) ** big) / (1 - phi + phi * a)
        + 2 * a / (2 - a)
        * sum(q**k * _pair_terms(g0, g1, phi, m, k) * (1 - q ** (2 * (big - k))) for k in range(1, n - m + 1))
    )


# -- smoothing-constant search ----------------------------------------------


def smoothing_grid(step: float = 0.01) -> np.ndarray:
    """Ascending grid ``step, 2*step, ..., 1``; ``step`` must divide 1."""
    if not 0.0 < step <= 1.0:
        raise ValueError(f"grid step must lie in (0, 1], got {step}")
    count = round(1.0 / step)
    if abs(count * step - 1.0) > 1e-9:
        raise ValueError(f"grid step {step} does not divide the unit interval")
    return np.round(np.arange(1, count + 1) * (1.0 / count), 12)


def mse_grid(params: ArmaParams, n: int, m: int, approach, smoothing) -> np.ndarray:
    """MSE for every smoothing constant in ``smoothing`` (compiled core when available)."""
    approach = Approach.parse(approach)
    MseQuery(params, n, m, 1.0, approach)
    alphas = np.ascontiguousarray(smoothing, dtype=float)
    if np.any(alphas <= 0.0) or np.any(alphas > 1.0):
        raise ValueError("smoothing constants must lie in (0, 1]")
    return kernels.mse_grid(
        params.gamma0, params.gamma1, params.phi, int(n), int(m), kernels.APPROACH_CODE[approach], alphas
    )


def optimize_smoothing(
    params: ArmaParams, n: int, m: int, approach, grid_step: float = 0.01
) -> tuple[float, MseResult]:
    """Grid argmin of the MSE; exact ties go to the smaller constant."""
    approach = Approach.parse(approach)
    grid = smoothing_grid(grid_step)
    values = mse_grid(params, n, m, approach, grid)
    best = float(grid[int(np.argmin(values))])
    return best, mse(MseQuery(params, n, m, best, approach))
