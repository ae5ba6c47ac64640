"""Command-line entry point: ``tempagg <subcommand> ...``.

Exit codes: 0 success, 1 domain error or failed ``--verify``, 2 usage error.
``AGG_SEED`` in the environment overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .analytical import MseQuery, mse, optimize_smoothing
from .empirical import (
    SmoothingPolicy,
    acf_profile,
    export_report,
    generate_dataset,
    load_series,
    rolling_origin_eval,
    screen_series,
    write_series,
)
from .experiments import (
    DEFAULT_M_VALUES,
    DEFAULT_N_VALUES,
    RATIO_HEADER,
    SweepGrid,
    export_ratio_table,
    sweep,
)
from .formatting import fmt, render_csv, write_csv
from .forecasting import Approach
from .oracle import build_error_weights, exact_mse, monte_carlo_mse
from .process import ArmaParams, DemandSeries, simulate
from .rules import AcfClass, classify_params, classify_series, recommend

EXACT_TOLERANCE = 1e-9


class VerificationFailed(RuntimeError):
    pass


def _seed(args) -> int:
    env = os.environ.get("AGG_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"AGG_SEED must be an integer, got {env!r}") from None
    return int(args.seed)


def _params(args) -> ArmaParams:
    return ArmaParams(args.phi, args.theta, args.sigma2, args.c)


def _write_meta(out: Path, payload: dict) -> None:
    meta = out.with_name(out.name + ".meta.json")
    meta.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _approaches(value: str) -> list[Approach]:
    if value == "all":
        return [Approach.NA, Approach.NOA, Approach.OA]
    return [Approach.parse(value)]


# -- subcommands ---------------------------------------------------------------


def cmd_mse(args) -> int:
    params = _params(args)
    seed = _seed(args)
    records = []
    failed = []
    for approach in _approaches(args.approach):
        if args.optimize:
            smoothing, result = optimize_smoothing(params, args.n, args.m, approach, args.grid_step)
        else:
            smoothing = args.alpha
            result = mse(MseQuery(params, args.n, args.m, smoothing, approach))
        rec = {
            "approach": approach.value,
            "smoothing": smoothing,
            "mse": result.mse,
            "var_demand": result.var_demand,
            "var_forecast": result.var_forecast,
            "cov_demand_forecast": result.cov_demand_forecast,
        }
        if args.verify:
            exact = exact_mse(params, build_error_weights(approach, args.n, args.m, smoothing))
            rel = abs(result.mse - exact) / max(abs(exact), np.finfo(float).tiny)
            rec["oracle_mse"] = exact
            rec["oracle_rel_delta"] = rel
            if rel > EXACT_TOLERANCE:
                failed.append(f"{approach.value}: quadratic-form delta {fmt(rel)}")
            if args.mc_replications:
                est = monte_carlo_mse(
                    params, args.n, args.m, smoothing, approach, args.mc_replications, seed
                )
                z = (result.mse - est.mean_squared_error) / est.standard_error
                rec.update(mc_mse=est.mean_squared_error, mc_se=est.standard_error, mc_z=z, seed=seed)
                if abs(z) > args.mc_se_limit:
                    failed.append(f"{approach.value}: Monte Carlo z-score {fmt(z)}")
        records.append(rec)

    if args.format == "json":
        out = {
            "params": {"phi": params.phi, "theta": params.theta, "sigma2": params.sigma2, "c": params.c},
            "n": args.n,
            "m": args.m,
            "results": [{k: (fmt(v) if isinstance(v, float) else v) for k, v in r.items()} for r in records],
            "verified": not failed if args.verify else None,
        }
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    else:
        for r in records:
            line = " ".join(f"{k}={fmt(v)}" for k, v in r.items())
            sys.stdout.write(line + "\n")
    if failed:
        raise VerificationFailed("verification failed: " + "; ".join(failed))
    return 0


def cmd_sweep(args) -> int:
    policy = args.smoothing.strip()
    fixed = None
    if policy != "optimal":
        fixed = SmoothingPolicy.parse(policy).value
    step = 0.05 if args.coarse else args.grid_step
    cases = None if args.case == "all" else [AcfClass(args.case)]
    grid = SweepGrid(
        m_values=tuple(args.m), n_values=tuple(args.n), fixed_smoothing=fixed, grid_step=step, cases=cases
    )
    table = sweep(grid, jobs=args.jobs)
    if args.out:
        export_ratio_table(table, args.out)
        _write_meta(Path(args.out), {
            "command": "sweep", "case": args.case, "smoothing": grid.mode, "grid_step": step,
            "m": list(args.m), "n": list(args.n), "backend": kernels.BACKEND,
        })
        for case in AcfClass:
            rows = table.select(case)
            if rows:
                sys.stdout.write(
                    f"{case.value}: pairs={rows[0].pairs} "
                    f"min_ratio_noa_na={fmt(min(r.ratio_noa_na for r in rows))} "
                    f"min_ratio_oa_na={fmt(min(r.ratio_oa_na for r in rows))}\n"
                )
    else:
        ordered = sorted(table.rows, key=lambda r: (r.case.value, r.m, r.n))
        sys.stdout.write(render_csv(RATIO_HEADER, (r.as_csv_row() for r in ordered)))
    return 0


def cmd_recommend(args) -> int:
    results = []
    if args.series_file:
        dataset = load_series(args.series_file)
        if args.series_id:
            if args.series_id not in dataset:
                raise ValueError(f"series {args.series_id!r} not found in {args.series_file}")
            dataset = {args.series_id: dataset[args.series_id]}
        for sid, series in dataset.items():
            cls = classify_series(series, args.max_lag)
            results.append((sid, cls, recommend(cls)))
    else:
        if args.phi is None or args.theta is None:
            raise ValueError("give --phi and --theta, or --series-file")
        cls = classify_params(_params(args))
        results.append(("params", cls, recommend(cls)))
    if args.format == "json":
        payload = [
            {"id": sid, "acf_class": c.value, "recommendation": r.approach.value, "rationale": r.rationale}
            for sid, c, r in results
        ]
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        for sid, c, r in results:
            sys.stdout.write(f"{sid}: {c.value} -> {r.approach.value}. {r.rationale}\n")
    return 0


def cmd_simulate(args) -> int:
    seed = _seed(args)
    series = simulate(_params(args), args.length, seed, burn_in=args.burn_in)
    dataset = {args.series_id: DemandSeries(series.values, origin_index=1)}
    out = Path(args.out)
    write_series(dataset, out)
    _write_meta(out, {
        "command": "simulate", "seed": seed, "phi": args.phi, "theta": args.theta,
        "sigma2": args.sigma2, "c": args.c, "length": args.length, "burn_in": args.burn_in,
    })
    return 0


def cmd_gen_dataset(args) -> int:
    seed = _seed(args)
    dataset = generate_dataset(_params(args), args.count, args.length, seed, burn_in=args.burn_in)
    out = Path(args.out)
    write_series(dataset, out)
    _write_meta(out, {
        "command": "gen-dataset", "seed": seed, "phi": args.phi, "theta": args.theta,
        "sigma2": args.sigma2, "c": args.c, "count": args.count, "length": args.length,
        "burn_in": args.burn_in,
    })
    return 0


def cmd_empirical(args) -> int:
    seed = _seed(args)
    dataset = load_series(args.data)
    if not args.no_screen:
        dataset = screen_series(dataset, args.min_len, args.max_len)
    policy = SmoothingPolicy.parse(args.smoothing)
    report = rolling_origin_eval(dataset, args.n, args.m, policy, verify_windows=args.verify_windows, seed=seed)
    out = Path(args.out)
    export_report(report, out)
    _write_meta(out, {
        "command": "empirical", "seed": seed, "data": Path(args.data).name, "n": list(args.n),
        "m": list(args.m), "smoothing": args.smoothing, "screened": not args.no_screen,
        "min_len": args.min_len, "max_len": args.max_len, "series_screened_in": len(dataset),
        "degenerate_windows": {f"m={r.m},n={r.n}": r.degenerate_windows for r in report.rows},
    })
    if args.acf_out:
        profile = acf_profile(dataset, args.max_lag)
        q = profile.quartiles()
        write_csv(
            args.acf_out,
            ("lag", "min", "q1", "median", "q3", "max", "series_count"),
            ((lag, *q[i], profile.values.shape[0]) for i, lag in enumerate(profile.lags)),
        )
    for r in report.rows:
        sys.stdout.write(
            f"m={r.m} n={r.n} ratio_noa_na={fmt(r.ratio_noa_na)} ratio_oa_na={fmt(r.ratio_oa_na)} "
            f"origins={r.origins_evaluated} series={r.series_count} degenerate={r.degenerate_windows}\n"
        )
    return 0


# -- parser --------------------------------------------------------------------


def _add_params(p, required: bool = True) -> None:
    p.add_argument("--phi", type=float, required=required, help="autoregressive coefficient")
    p.add_argument("--theta", type=float, required=required, help="moving-average coefficient")
    p.add_argument("--sigma2", type=float, default=1.0, help="innovation variance (default 1)")
    p.add_argument("--c", type=float, default=0.0, help="level constant (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempagg",
        description="Finite-history MSE of SES forecasts on raw vs temporally aggregated ARMA(1,1) demand.",
    )
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mse", help="analytical MSE for one query")
    _add_params(p)
    p.add_argument("--n", type=int, required=True, help="history length")
    p.add_argument("--m", type=int, required=True, help="aggregation level / horizon")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float, help="smoothing constant in (0, 1]")
    group.add_argument("--optimize", action="store_true", help="grid-search the smoothing constant")
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--approach", choices=["na", "noa", "oa", "all"], default="all")
    p.add_argument("--verify", action="store_true", help="check against the quadratic-form and Monte Carlo oracles")
    p.add_argument("--mc-replications", type=int, default=20_000, help="0 disables the Monte Carlo check")
    p.add_argument("--mc-se-limit", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_mse)

    p = sub.add_parser("sweep", help="case-averaged MSE ratio table")
    p.add_argument("--case", choices=["all"] + [c.value for c in AcfClass], default="all")
    p.add_argument("--smoothing", default="optimal", help="'optimal' or fixed(VALUE)")
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--coarse", action="store_true", help="use a 0.05 smoothing grid")
    p.add_argument("--m", type=int, nargs="+", default=list(DEFAULT_M_VALUES))
    p.add_argument("--n", type=int, nargs="+", default=list(DEFAULT_N_VALUES))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("recommend", help="aggregate-or-not rule for parameters or series")
    _add_params(p, required=False)
    p.add_argument("--series-file", help="long-format CSV series_id,period,value")
    p.add_argument("--series-id")
    p.add_argument("--max-lag", type=int, default=12)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("simulate", help="write one simulated series as CSV")
    _add_params(p)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=500)
    p.add_argument("--series-id", default="sim")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-dataset", help="synthetic stand-in dataset of simulated series")
    _add_params(p, required=False)
    p.set_defaults(phi=0.9, theta=0.2)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--length", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=500)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("empirical", help="rolling-origin evaluation on a series CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--n", type=int, nargs="+", default=[120])
    p.add_argument("--m", type=int, nargs="+", default=list(DEFAULT_M_VALUES))
    p.add_argument("--smoothing", default="fit-insample", help="'fit-insample' or fixed(VALUE)")
    p.add_argument("--min-len", type=int, default=320)
    p.add_argument("--max-len", type=int, default=500)
    p.add_argument("--no-screen", action="store_true")
    p.add_argument("--max-lag", type=int, default=12)
    p.add_argument("--acf-out", help="optional per-lag ACF quartile CSV")
    p.add_argument("--verify-windows", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_empirical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, VerificationFailed) as exc:
        sys.stderr.write(f"tempagg {args.command}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
