"""Parameter sweeps: case-averaged MSE ratios of aggregated vs raw-series SES.

For every (phi, theta) pair on the grid the ACF case is determined, the three
MSEs are computed for every (m, N), and the MSEs are averaged per
(case, m, N) cell before the ratios are taken (ratio of averages).
sigma2 = 1 and C = 0 throughout; the ratios do not depend on either.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .analytical import smoothing_grid
from .formatting import write_csv
from .forecasting import Approach, SesConfig
from .process import ArmaParams
from .rules import AcfClass, classify_params

__all__ = [
    "DEFAULT_N_VALUES",
    "DEFAULT_M_VALUES",
    "default_parameter_values",
    "SweepGrid",
    "RatioRow",
    "RatioTable",
    "RATIO_HEADER",
    "sweep",
    "fixed_constant_sweep",
    "export_ratio_table",
    "tail_flatness",
]

DEFAULT_M_VALUES = (2, 7, 12)
DEFAULT_N_VALUES = (24, 36, 48, 60, 72, 84, 108, 132, 154, 250, 500)
RATIO_HEADER = (
    "case", "m", "n", "avg_mse_na", "avg_mse_noa", "avg_mse_oa", "ratio_noa_na", "ratio_oa_na",
)
_APPROACHES = (Approach.NA, Approach.NOA, Approach.OA)
_CASE_ORDER = sorted(AcfClass, key=lambda c: c.value)


def default_parameter_values(step: float = 0.05, limit: float = 0.95) -> tuple[float, ...]:
    count = round(limit / step)
    return tuple(float(v) for v in np.round(np.arange(-count, count + 1) * step, 10))


@dataclass(frozen=True)
class SweepGrid:
    phi_values: Sequence[float] = field(default_factory=default_parameter_values)
    theta_values: Sequence[float] = field(default_factory=default_parameter_values)
    m_values: Sequence[int] = DEFAULT_M_VALUES
    n_values: Sequence[int] = DEFAULT_N_VALUES
    fixed_smoothing: float | None = None
    grid_step: float = 0.01
    cases: Sequence[AcfClass] | None = None

    def __post_init__(self) -> None:
        for v in (*self.phi_values, *self.theta_values):
            if not -1.0 < v < 1.0:
                raise ValueError(f"grid parameter {v} outside (-1, 1)")
        if min(self.m_values) < 1:
            raise ValueError("aggregation levels must be >= 1")
        if min(self.n_values) < max(self.m_values):
            raise ValueError("every N must be at least the largest m")
        if self.fixed_smoothing is not None:
            SesConfig(self.fixed_smoothing)
        else:
            smoothing_grid(self.grid_step)

    @property
    def mode(self) -> str:
        return "optimal" if self.fixed_smoothing is None else f"fixed({self.fixed_smoothing:g})"


@dataclass(frozen=True)
class RatioRow:
    case: AcfClass
    m: int
    n: int
    avg_mse_na: float
    avg_mse_noa: float
    avg_mse_oa: float
    ratio_noa_na: float
    ratio_oa_na: float
    pairs: int

    def as_csv_row(self) -> tuple:
        return (
            self.case.value, self.m, self.n, self.avg_mse_na, self.avg_mse_noa,
            self.avg_mse_oa, self.ratio_noa_na, self.ratio_oa_na,
        )


@dataclass
class RatioTable:
    rows: list[RatioRow]
    mode: str = "optimal"

    def cell(self, case: AcfClass, m: int, n: int) -> RatioRow:
        for row in self.rows:
            if row.case is case and row.m == m and row.n == n:
                return row
        raise KeyError((case, m, n))

    def select(self, case: AcfClass | None = None, m: int | None = None) -> list[RatioRow]:
        return [
            r for r in self.rows
            if (case is None or r.case is case) and (m is None or r.m == m)
        ]


def _pair_mses(task) -> np.ndarray:
    """MSE array of shape (len(m_values), len(n_values), 3) for one (phi, theta)."""
    phi, theta, m_values, n_values, alphas = task
    p = ArmaParams(phi, theta)
    out = np.empty((len(m_values), len(n_values), len(_APPROACHES)))
    for i, m in enumerate(m_values):
        for j, n in enumerate(n_values):
            for k, approach in enumerate(_APPROACHES):
                values = kernels.mse_grid(
                    p.gamma0, p.gamma1, p.phi, int(n), int(m), kernels.APPROACH_CODE[approach], alphas
                )
                out[i, j, k] = values.min()
    return out


def sweep(grid: SweepGrid | None = None, jobs: int = 1) -> RatioTable:
    grid = grid or SweepGrid()
    if grid.fixed_smoothing is None:
        alphas = smoothing_grid(grid.grid_step)
    else:
        alphas = np.array([float(grid.fixed_smoothing)])
    wanted = set(grid.cases) if grid.cases is not None else set(AcfClass)

    pairs: list[tuple[float, float]] = []
    labels: list[AcfClass] = []
    for phi in grid.phi_values:
        for theta in grid.theta_values:
            case = classify_params(ArmaParams(phi, theta))
            if case in wanted:
                pairs.append((phi, theta))
                labels.append(case)

    m_values, n_values = tuple(grid.m_values), tuple(grid.n_values)
    tasks = [(phi, theta, m_values, n_values, alphas) for phi, theta in pairs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pair_mses, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_pair_mses(t) for t in tasks]

    rows: list[RatioRow] = []
    label_arr = np.array([c.value for c in labels])
    stacked = np.stack(results) if results else np.empty((0, len(m_values), len(n_values), 3))
    for case in _CASE_ORDER:
        members = np.flatnonzero(label_arr == case.value)
        if members.size == 0:
            continue
        # fixed member order keeps the reduction (and the output bytes) stable
        avg = stacked[members].sum(axis=0) / members.size
        for i, m in sorted(enumerate(m_values), key=lambda t: t[1]):
            for j, n in sorted(enumerate(n_values), key=lambda t: t[1]):
                na, noa, oa = (float(v) for v in avg[i, j])
                rows.append(RatioRow(case, int(m), int(n), na, noa, oa, noa / na, oa / na, int(members.size)))
    return RatioTable(rows, grid.mode)


def fixed_constant_sweep(alpha: float, grid: SweepGrid | None = None, jobs: int = 1) -> RatioTable:
    """Same protocol as :func:`sweep` with one smoothing constant shared by all approaches."""
    SesConfig(alpha)
    base = grid or SweepGrid()
    fixed = SweepGrid(
        base.phi_values, base.theta_values, base.m_values, base.n_values,
        fixed_smoothing=float(alpha), grid_step=base.grid_step, cases=base.cases,
    )
    return sweep(fixed, jobs=jobs)


def export_ratio_table(table: RatioTable, path) -> None:
    ordered = sorted(table.rows, key=lambda r: (r.case.value, r.m, r.n))
    write_csv(path, RATIO_HEADER, (r.as_csv_row() for r in ordered))


def tail_flatness(table: RatioTable, short: int = 250, long: int = 500) -> dict:
    """Relative MSE decrease from ``short`` to ``long`` history, total and per period.

    Keyed by (case, m, approach); values are (total, per_period) fractions.
    """
    out = {}
    for case in _CASE_ORDER:
        ms = sorted({r.m for r in table.select(case)})
        for m in ms:
            try:
                a, b = table.cell(case, m, short), table.cell(case, m, long)
            except KeyError:
                continue
            for name in ("na", "noa", "oa"):
                v0 = getattr(a, f"avg_mse_{name}")
                v1 = getattr(b, f"avg_mse_{name}")
                total = (v0 - v1) / v0
                out[(case, m, name)] = (total, total / (long - short))
    return out
