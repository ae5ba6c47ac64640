"""Ground truth for the analytical MSEs.

Every cumulative forecast here is a linear combination of raw demands (the
SES initial value is itself an observation), so the forecast error over the
next ``m`` periods is ``w @ d`` for a fixed weight vector ``w``.  Its variance
is the quadratic form ``w' Gamma w`` with the Toeplitz autocovariance matrix.

The Monte Carlo estimator deliberately goes through the simulation,
transforms and forecasting code instead, so a misreading shared by the
closed forms and the weight expansion would still be caught.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .forecasting import Approach, SesConfig, cumulative_forecast
from .process import DEFAULT_BURN_IN, ArmaParams, autocovariances, simulate_paths
from .transforms import InsufficientHistoryError

__all__ = [
    "ErrorWeightVector",
    "MonteCarloEstimate",
    "build_error_weights",
    "exact_mse",
    "monte_carlo_mse",
]


@dataclass(frozen=True)
class ErrorWeightVector:
    """Weights over ``(d_{t-n}, ..., d_{t-1}, d_t, ..., d_{t+m-1})``."""

    weights: np.ndarray
    approach: Approach
    n: int
    m: int
    smoothing: float


def _ses_weights(count: int, beta: float) -> np.ndarray:
    """SES weights over ``count`` inputs, oldest first, including the initial value."""
    w = beta * (1.0 - beta) ** np.arange(count)[::-1]
    w[0] += (1.0 - beta) ** count
    return w


def build_error_weights(approach, n: int, m: int, smoothing: float) -> ErrorWeightVector:
    approach = Approach.parse(approach)
    SesConfig(smoothing)
    if m < 1 or n < 1:
        raise ValueError("n and m must be positive")
    forecast = np.zeros(n)
    if approach is Approach.NA:
        forecast[:] = m * _ses_weights(n, smoothing)
    elif approach is Approach.NOA:
        buckets = n // m
        if buckets < 1:
            raise InsufficientHistoryError(f"insufficient history for one bucket: n={n}, m={m}")
        offset = n - buckets * m
        for b, wb in enumerate(_ses_weights(buckets, smoothing)):
            start = offset + b * m
            forecast[start:start + m] += wb
    else:
        windows = n - m + 1
        if windows < 1:
            raise InsufficientHistoryError(f"insufficient history for one bucket: n={n}, m={m}")
        for b, wb in enumerate(_ses_weights(windows, smoothing)):
            forecast[b:b + m] += wb
    weights = np.concatenate([-forecast, np.ones(m)])
    return ErrorWeightVector(weights, approach, int(n), int(m), float(smoothing))


def exact_mse(params: ArmaParams, weights) -> float:
    """``sum_ij w_i w_j gamma_|i-j|`` for a weight vector (or ErrorWeightVector)."""
    w = weights.weights if isinstance(weights, ErrorWeightVector) else np.asarray(weights, dtype=float)
    if w.size == 0:
        return 0.0
    gamma = toeplitz(autocovariances(params, w.size - 1))
    return float(w @ gamma @ w)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean_squared_error: float
    standard_error: float
    replications: int
    seed: int


def monte_carlo_mse(
    params: ArmaParams,
    n: int,
    m: int,
    smoothing: float,
    approach,
    replications: int = 100_000,
    seed: int = 0,
    burn_in: int = DEFAULT_BURN_IN,
    chunk: int = 20_000,
) -> MonteCarloEstimate:
    """Estimate the MSE by simulating ``replications`` independent histories.

    Paths are generated in fixed-size chunks from one seeded generator, so
    the estimate depends only on ``seed`` and ``replications``.
    """
    if replications < 2:
        raise ValueError("need at least two replications")
    approach = Approach.parse(approach)
    config = SesConfig(smoothing)
    rng = np.random.default_rng(seed)
    squared = np.empty(replications)
    done = 0
    while done < replications:
        size = min(chunk, replications - done)
        paths = simulate_paths(params, n + m, size, rng, burn_in=burn_in)
        history, future = paths[:, :n], paths[:, n:]
        forecast = cumulative_forecast(history, m, config, approach).value
        err = future.sum(axis=1) - forecast
        squared[done:done + size] = err * err
        done += size
    mean = float(np.mean(squared))
    se = float(np.std(squared, ddof=1) / np.sqrt(replications))
    return MonteCarloEstimate(mean, se, replications, seed)
