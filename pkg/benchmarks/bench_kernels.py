"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3]

The workloads mirror the real hot paths: the MSE grid over 100 smoothing
constants for a slice of the sweep, and the in-sample constant fit over the
rolling-origin windows of 50 series.
"""

from __future__ import annotations

import argparse
import time

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from tempagg.analytical import smoothing_grid
from tempagg.kernels import _fallback

try:
    from tempagg.kernels import _core
except ImportError:
    _core = None

PAIRS = [(phi, theta) for phi in (-0.9, -0.5, 0.1, 0.6, 0.9) for theta in (-0.7, 0.0, 0.7)]
N_VALUES = (24, 60, 132, 250, 500)
M_VALUES = (2, 7, 12)


def sweep_slice(impl) -> float:
    alphas = smoothing_grid(0.01)
    total = 0.0
    for phi, theta in PAIRS:
        g0 = 1.0 + (phi - theta) ** 2 / (1.0 - phi * phi)
        g1 = (phi - theta) * (1.0 - phi * theta) / (1.0 - phi * phi)
        for m in M_VALUES:
            for n in N_VALUES:
                for code in (0, 1, 2):
                    total += impl.mse_grid(g0, g1, phi, n, m, code, alphas).min()
    return total


def fit_windows(impl) -> float:
    rng = np.random.default_rng(0)
    alphas = smoothing_grid(0.05)
    total = 0.0
    for _ in range(50):
        series = rng.standard_normal(400).cumsum()
        windows = np.ascontiguousarray(sliding_window_view(series, 120))
        forecast, _ = impl.ses_fit_windows(windows, alphas)
        total += forecast.sum()
    return total


def best_of(fn, impl, repeat: int) -> tuple[float, float]:
    times, value = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        value = fn(impl)
        times.append(time.perf_counter() - start)
    return min(times), value


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _core is None:
        print("compiled extension not built; only the fallback can be timed")
    print(f"{'workload':<14}{'python [s]':>12}{'compiled [s]':>14}{'speed-up':>10}")
    for name, fn in (("sweep slice", sweep_slice), ("fit windows", fit_windows)):
        t_py, v_py = best_of(fn, _fallback, args.repeat)
        if _core is None:
            print(f"{name:<14}{t_py:>12.3f}{'-':>14}{'-':>10}")
            continue
        t_c, v_c = best_of(fn, _core, args.repeat)
        assert abs(v_py - v_c) <= 1e-8 * max(1.0, abs(v_py)), (name, v_py, v_c)
        print(f"{name:<14}{t_py:>12.3f}{t_c:>14.3f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
