"""Acceptance criteria, one recorded PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -s``; the lines are also
repeated in the terminal summary.  The full default sweep (optimal smoothing,
0.01 grid) is computed once per module.
"""

import itertools

import numpy as np
import pytest

from tempagg.analytical import MseQuery, mse
from tempagg.cli import main
from tempagg.empirical import SmoothingPolicy, generate_dataset, rolling_origin_eval
from tempagg.experiments import (
    SweepGrid,
    export_ratio_table,
    fixed_constant_sweep,
    sweep,
    tail_flatness,
)
from tempagg.forecasting import Approach
from tempagg.oracle import build_error_weights, exact_mse, monte_carlo_mse
from tempagg.process import ArmaParams
from tempagg.rules import AcfClass

COEF = (-0.8, -0.4, 0.0, 0.4, 0.8)
M_VALUES = (1, 2, 3, 7, 12)
N_VALUES = (24, 36, 60)
SMOOTHING = (0.1, 0.5, 0.9)
GRID = list(itertools.product(COEF, COEF, M_VALUES, N_VALUES, SMOOTHING))


@pytest.fixture(scope="module")
def optimal_table():
    return sweep(SweepGrid())


def minima(table, case, m=None):
    rows = table.select(case, m)
    return min(r.ratio_noa_na for r in rows), min(r.ratio_oa_na for r in rows)


def test_criterion_01_oracle_equivalence(criterion):
    worst = 0.0
    for phi, theta, m, n, s in GRID:
        p = ArmaParams(phi, theta)
        for approach in Approach:
            value = mse(MseQuery(p, n, m, s, approach)).mse
            exact = exact_mse(p, build_error_weights(approach, n, m, s))
            worst = max(worst, abs(value - exact) / exact)
    criterion(1, worst <= 1e-9, f"oracle equivalence over {3 * len(GRID)} queries, max rel err {worst:.2e} (<= 1e-9)")


def test_criterion_02_monte_carlo(criterion):
    picks = np.random.default_rng(20240601).choice(len(GRID), size=20, replace=False)
    worst = 0.0
    for k, idx in enumerate(picks):
        phi, theta, m, n, s = GRID[idx]
        approach = list(Approach)[k % 3]
        p = ArmaParams(phi, theta)
        value = mse(MseQuery(p, n, m, s, approach)).mse
        est = monte_carlo_mse(p, n, m, s, approach, replications=100_000, seed=1000 + k)
        worst = max(worst, abs(value - est.mean_squared_error) / est.standard_error)
    criterion(2, worst <= 3.0, f"20 queries x 1e5 replications, max |z| {worst:.2f} (<= 3)")


def test_criterion_03_collapse(criterion):
    worst = 0.0
    for phi, theta, _, n, s in GRID:
        p = ArmaParams(phi, theta)
        na, noa, oa = (mse(MseQuery(p, n, 1, s, a)).mse for a in Approach)
        worst = max(worst, abs(noa - na) / na, abs(oa - na) / na)
    exact = True
    for phi in (-0.8, -0.4, 0.0, 0.4, 0.8, 0.95):
        for s2 in (1.0, 2.5, 0.3):
            p = ArmaParams(phi, phi, s2)
            exact &= p.gamma1 == 0.0 and mse(MseQuery(p, 24, 1, 1.0)).mse == 2.0 * s2
    criterion(3, worst <= 1e-12 and exact,
              f"m=1 max rel spread {worst:.1e} (<= 1e-12); white noise gamma1 == 0 and MSE == 2 sigma2 exactly: {exact}")


def test_criterion_04_negative_minima(optimal_table, criterion):
    noa, oa = minima(optimal_table, AcfClass.NEGATIVE)
    ok = 0.62 <= oa <= 0.70 and 0.64 <= noa <= 0.72
    criterion(4, ok, f"negative case min ratio_oa_na {oa:.4f} in [0.62, 0.70], min ratio_noa_na {noa:.4f} in [0.64, 0.72]")


def test_criterion_05_oscillating_minima(optimal_table, criterion):
    noa, oa = minima(optimal_table, AcfClass.OSCILLATING)
    ok = 0.65 <= oa <= 0.73 and 0.66 <= noa <= 0.74
    criterion(5, ok, f"oscillating case min ratio_oa_na {oa:.4f} in [0.65, 0.73], min ratio_noa_na {noa:.4f} in [0.66, 0.74]")


def test_criterion_06_positive_dominance(optimal_table, criterion):
    rows = optimal_table.select(AcfClass.POSITIVE)
    noa, oa = minima(optimal_table, AcfClass.POSITIVE)
    ok = len(rows) == 33 and noa > 1 and oa > 1
    criterion(6, ok, f"positive case over {len(rows)} cells: min ratio_noa_na {noa:.4f} > 1, min ratio_oa_na {oa:.4f} > 1")


def test_criterion_07_white_noise(optimal_table, criterion):
    noa12, oa12 = minima(optimal_table, AcfClass.WHITE_NOISE, 12)
    low12 = min(noa12, oa12)
    m2 = [v for r in optimal_table.select(AcfClass.WHITE_NOISE, 2) for v in (r.ratio_noa_na, r.ratio_oa_na)]
    ok = 0.83 <= low12 <= 0.92 and all(0.95 <= v <= 1.01 for v in m2)
    criterion(7, ok, f"white noise m=12 min ratio {low12:.4f} in [0.83, 0.92]; m=2 ratios span "
                     f"[{min(m2):.4f}, {max(m2):.4f}] within [0.95, 1.01]")


def test_criterion_08_fixed_constant_short_history(criterion):
    grid = SweepGrid(n_values=(24,), cases=[AcfClass.NEGATIVE, AcfClass.OSCILLATING])
    table = fixed_constant_sweep(0.1, grid)
    rows = table.rows
    margins = [r.ratio_noa_na - r.ratio_oa_na for r in rows]
    ok = len(rows) == 6 and min(margins) > 0
    criterion(8, ok, f"alpha=0.1, N=24: ratio_oa_na < ratio_noa_na in {sum(m > 0 for m in margins)}/{len(rows)} "
                     f"(case, m) cells, smallest margin {min(margins):.4f}")


def test_criterion_09_tail_flatness(optimal_table, criterion):
    flat = tail_flatness(optimal_table, 250, 500)
    worst_key = max(flat, key=lambda k: flat[k][1])
    total, per = flat[worst_key]
    max_total = max(v[0] for v in flat.values())
    ok = len(flat) == 4 * 3 * 3 and all(v[1] < 0.0002 for v in flat.values())
    case, m, approach = worst_key
    criterion(9, ok, f"largest per-period MSE decrease N=250->500 is {100 * per:.4f}% "
                     f"({case.value}, m={m}, {approach}); limit 0.02%; largest total decrease {100 * max_total:.2f}%")


def test_criterion_10_empirical_positive(criterion):
    ds = generate_dataset(ArmaParams(0.9, 0.2), count=50, length=400, seed=0)
    report = rolling_origin_eval(ds, 120, (2, 7, 12), SmoothingPolicy())
    ratios = [v for r in report.rows for v in (r.ratio_noa_na, r.ratio_oa_na)]
    ok = len(report.rows) == 3 and min(ratios) > 1
    detail = ", ".join(f"m={r.m}: {r.ratio_noa_na:.3f}/{r.ratio_oa_na:.3f}" for r in report.rows)
    criterion(10, ok, f"50 series phi=0.9 theta=0.2, N=120, ratios noa/oa {detail}; all > 1")


def test_criterion_11_determinism(optimal_table, tmp_path, capsys, criterion):
    in_process = tmp_path / "sweep_lib.csv"
    export_ratio_table(optimal_table, in_process)
    cli_sweep = tmp_path / "sweep_cli.csv"
    assert main(["sweep", "--out", str(cli_sweep)]) == 0

    data = tmp_path / "data.csv"
    assert main(["gen-dataset", "--seed", "7", "--out", str(data)]) == 0
    reports = []
    for k in range(2):
        out = tmp_path / f"emp{k}.csv"
        assert main(["empirical", "--data", str(data), "--no-screen", "--seed", "7", "--out", str(out)]) == 0
        reports.append(out.read_bytes())
    capsys.readouterr()
    same_sweep = in_process.read_bytes() == cli_sweep.read_bytes()
    same_emp = reports[0] == reports[1]
    criterion(11, same_sweep and same_emp,
              f"full default sweep byte-identical across runs: {same_sweep}; empirical report byte-identical: {same_emp}")
