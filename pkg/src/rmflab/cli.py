"""Command-line front end.

Subcommands::

    rmflab simulate       grid trajectories of the large-prime sum and variance
    rmflab oracle-check   fast evaluators vs. the definition-level brute force
    rmflab moments        the inequality suites (hypercontractive, hoeffding,
                          doob, submartingale-z, submartingale-y)
    rmflab euler          product / integral checks (parseval,
                          product-expectation, sigma-event)
    rmflab variance       ensemble distribution of V(x) vs. its exact mean
    rmflab report         aggregate rows from earlier simulate CSV output

Output is byte-deterministic for a fixed argument list (including across
``--threads`` settings): floats are printed with the shortest round-trip
``%.17g`` format and rows are emitted in a fixed order.

Exit codes: 0 all checks passed, 1 a statistical check was violated,
2 usage error, 3 resource or quadrature failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import harness
from .euler import (
    QuadratureConfig,
    QuadratureError,
    expected_product_identity_check,
    parseval_identity_check,
    parseval_integral,
)
from .harness import ExperimentConfig
from .reporting import MomentReport
from .rmf import Model, SampledFunction
from .sieve import build_tables, load_spf_cache, save_spf_cache
from .sums import large_prime_sum, large_prime_sum_bruteforce

ENV_CACHE = "RMF_TABLE_CACHE"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _emit(rows: list[dict], fmt: str, out_path: str | None) -> None:
    """Write rows as RFC-4180 CSV or a JSON array, to a file or stdout."""
    if fmt == "json":
        text = json.dumps(
            [{k: (_fmt(v) if isinstance(v, float) else v) for k, v in r.items()}
             for r in rows],
            indent=2,
        ) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(
                buf, fieldnames=list(rows[0].keys()), lineterminator="\r\n"
            )
            writer.writeheader()
            for r in rows:
                writer.writerow({k: _fmt(v) for k, v in r.items()})
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tables(args):
    limit = max(args.x_max, 1000)
    cache = getattr(args, "table_cache", None) or os.environ.get(ENV_CACHE)
    if cache and os.path.exists(cache):
        tables = load_spf_cache(cache)
        if tables.limit >= limit:
            return tables
    tables = build_tables(limit)
    if cache:
        save_spf_cache(tables, cache)
    return tables


def _report_rows(reports: list[MomentReport]) -> list[dict]:
    rows = []
    for r in reports:
        row = {
            "label": r.label,
            "estimate": float(r.estimate),
            "std_error": float(r.std_error),
            "bound": float(r.bound),
            "trials": r.trials,
            "violated": bool(r.violated),
        }
        for k in sorted(r.aux):
            row[f"aux_{k}"] = r.aux[k]
        rows.append(row)
    return rows


def _decimate(n: int, keep: int = 30) -> np.ndarray:
    """Indices of ~keep geometrically spaced grid points, always incl. ends."""
    if n <= keep:
        return np.arange(n)
    idx = np.unique(
        np.round(np.geomspace(1, n, keep)).astype(np.int64) - 1
    )
    return idx


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    config = ExperimentConfig(
        model=args.model, epsilon=args.epsilon, seed_base=args.seed,
        trials=args.trials, x_max=args.x_max, t_param=args.t_param,
    )
    tables = _tables(args)
    grid = harness.test_points(config.epsilon, config.x_max)
    keep = np.arange(grid.size) if args.full_grid else _decimate(grid.size)

    def one(seed: int):
        tr = harness.run_trial(config, seed, tables, grid=grid)
        m = np.asarray(tr.m_values, dtype=np.complex128)[keep]
        v = tr.v_values[keep]
        return tr, m, v

    seeds = [config.seed_base + i for i in range(config.trials)]
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as ex:
            results = list(ex.map(one, seeds))
    else:
        results = [one(s) for s in seeds]

    rows = []
    sups = []
    for i, (tr, m, v) in enumerate(results):
        sups.append(tr.normalized_sup)
        gx = grid[keep].astype(np.float64)
        scale = np.sqrt(gx) * harness.fluctuation_scale(grid[keep], config.epsilon)
        for j in range(len(keep)):
            normalized = float(abs(m[j]) / scale[j])
            rows.append(
                {
                    "trial": i,
                    "seed": tr.seed,
                    "x": int(grid[keep[j]]),
                    "m_re": float(m[j].real),
                    "m_im": float(m[j].imag),
                    "v": float(v[j]),
                    "normalized": normalized,
                    "variance_ratio": float(
                        v[j] * math.sqrt(math.log(math.log(gx[j]))) / gx[j]
                    ),
                    # reference threshold for sup exceedance studies
                    "exceed6": int(normalized > 6.0),
                }
            )
    sups_arr = np.asarray(sups)
    rows.append(
        {
            "trial": -1,
            "seed": config.seed_base,
            "x": int(grid[-1]) if grid.size else 0,
            "m_re": float(np.median(sups_arr)),
            "m_im": float(np.quantile(sups_arr, 0.9)),
            "v": float(np.max(sups_arr)),
            "normalized": float(np.mean(sups_arr)),
            "variance_ratio": float(np.std(sups_arr, ddof=1)) if len(sups) > 1 else 0.0,
            "exceed6": float(np.mean(sups_arr > 6.0)),
        }
    )
    _emit(rows, args.format, args.out)
    return 0


def _cmd_oracle_check(args) -> int:
    tables = _tables(args)
    xs = [int(v) for v in args.points.split(",")] if args.points else [100, 1000, 3000]
    rows = []
    ok = True
    n_seeds = args.seeds if args.seeds is not None else args.trials
    for i in range(n_seeds):
        F = SampledFunction(args.model, args.seed + i, tables)
        for x in xs:
            fast = complex(large_prime_sum(F, x))
            brute = complex(large_prime_sum_bruteforce(F, x))
            match = abs(fast - brute) <= 1e-9 * max(1.0, abs(brute))
            ok = ok and match
            rows.append(
                {
                    "seed": args.seed + i,
                    "x": x,
                    "fast_re": fast.real,
                    "fast_im": fast.imag,
                    "brute_re": brute.real,
                    "brute_im": brute.imag,
                    "match": match,
                }
            )
    _emit(rows, args.format, args.out)
    return 0 if ok else 1


def _cmd_moments(args) -> int:
    tables = _tables(args)
    model = Model(args.model)
    reports: list[MomentReport] = []
    if args.suite == "hypercontractive":
        n_max = args.n if args.n is not None else args.x_max
        weights = {n: 1.0 / n for n in range(1, n_max + 1)}
        for m in ((args.m,) if args.m is not None else (1, 2, 3)):
            reports.append(
                harness.hypercontractive_check(
                    weights, m, args.trials, model, tables, seed_base=args.seed
                )
            )
    elif args.suite == "hoeffding":
        for x in [int(v) for v in args.points.split(",")] if args.points else [1000]:
            reports.append(
                harness.hoeffding_tail_check(
                    model, x, args.epsilon, args.seed, args.trials, tables
                )
            )
    elif args.suite == "doob":
        reports.append(
            harness.doob_check("z", args.lam, None, args.trials, model, tables,
                               seed_base=args.seed)
        )
        reports.append(
            harness.doob_check("z", args.lam, 2, args.trials, model, tables,
                               seed_base=args.seed)
        )
    elif args.suite == "submartingale-z":
        reports.extend(
            harness.submartingale_z_check(
                model, 1000, 1365, 1375, args.trials, args.seed, tables
            )
        )
    elif args.suite == "submartingale-y":
        reports.append(
            harness.y_submartingale_check(
                model, 100, 150, args.trials, args.seed, tables
            )
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown suite {args.suite}")
    _emit(_report_rows(reports), args.format, args.out)
    return 1 if any(r.violated for r in reports) else 0


def _cmd_euler(args) -> int:
    tables = _tables(args)
    model = Model(args.model)
    quad = QuadratureConfig(t_cut=args.tcut, rel_tol=args.quad_tol)
    if args.check == "parseval":
        rng = np.random.default_rng(args.seed)
        rows = []
        ok = True
        for i in range(args.trials):
            n = int(rng.integers(1, 30))
            coeffs = rng.normal(size=n) + 1j * rng.normal(size=n)
            res = parseval_identity_check(coeffs, 0.5, quad)
            tol = res.error_bound + 1e-6 * max(1.0, abs(res.lhs))
            match = abs(res.lhs - res.rhs) <= tol
            ok = ok and match
            rows.append(
                {
                    "case": i,
                    "n_coeffs": n,
                    "lhs": res.lhs,
                    "rhs": res.rhs,
                    "error_bound": res.error_bound,
                    "match": match,
                }
            )
        _emit(rows, args.format, args.out)
        return 0 if ok else 1
    if args.check == "product-expectation":
        reports = []
        xs = [int(v) for v in args.points.split(",")] if args.points else [10, 100]
        for x in xs:
            reports.append(
                expected_product_identity_check(
                    model, x, min(args.x_max, 10 * x), args.t_param, args.trials,
                    tables, seed_base=args.seed,
                )
            )
        _emit(_report_rows(reports), args.format, args.out)
        return 1 if any(r.violated for r in reports) else 0
    if args.check == "sigma-event":
        stat = harness.sigma_event_statistic(
            model, min(args.x_max, 1000), args.trials, args.t_param, tables,
            seed_base=args.seed,
        )
        rows = [
            {
                "x_prev": stat["x_prev"],
                "trials": stat["trials"],
                "threshold": stat["threshold"],
                "exceed_fraction": stat["exceed_fraction"],
                "budget_shape": stat["budget_shape"],
                "mean_sqrt_ratio": stat["mean_sqrt_ratio"],
                **{f"q{k}": v for k, v in stat["quantiles"].items()},
            }
        ]
        _emit(rows, args.format, args.out)
        return 0
    raise ValueError(f"unknown check {args.check}")  # pragma: no cover


def _cmd_variance(args) -> int:
    tables = _tables(args)
    config = ExperimentConfig(
        model=args.model, epsilon=args.epsilon, seed_base=args.seed,
        trials=args.trials, x_max=args.x_max,
    )
    xs = [int(v) for v in args.points.split(",")] if args.points else [1000, 10000]
    rows = harness.variance_ratio_ensemble(config, tables, xs=xs)
    _emit(rows, args.format, args.out)
    return 1 if any(r["violated"] for r in rows) else 0


def _cmd_report(args) -> int:
    stats: dict[int, list[float]] = {}
    for path in args.inputs:
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                if int(row["trial"]) < 0:
                    continue
                stats.setdefault(int(row["x"]), []).append(float(row["normalized"]))
    rows = []
    for x in sorted(stats):
        vals = np.asarray(stats[x])
        rows.append(
            {
                "x": x,
                "count": len(vals),
                "median_normalized": float(np.median(vals)),
                "q90_normalized": float(np.quantile(vals, 0.9)),
                "max_normalized": float(np.max(vals)),
            }
        )
    _emit(rows, args.format, args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=[m.value for m in Model],
                        default="rademacher")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--threads", default="1",
                        help="worker count, or 'auto' for one per CPU")
    common.add_argument("--epsilon", type=float, default=0.1)
    common.add_argument("--x-max", type=int, default=10_000)
    common.add_argument("--t-param", type=float, default=10.0)
    common.add_argument("--tcut", type=float, default=None)
    common.add_argument("--quad-tol", type=float, default=1e-6)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--table-cache", default=None,
                        help=f"sieve cache path (or ${ENV_CACHE})")

    p = argparse.ArgumentParser(prog="rmflab", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", parents=[common])
    sp.add_argument("--full-grid", action="store_true")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("oracle-check", parents=[common])
    sp.add_argument("--points", default=None, help="comma-separated x values")
    sp.add_argument("--seeds", type=int, default=None,
                    help="number of seeds (defaults to --trials)")
    sp.set_defaults(func=_cmd_oracle_check)

    sp = sub.add_parser("moments", parents=[common])
    sp.add_argument("--suite", required=True,
                    choices=["hypercontractive", "hoeffding", "doob",
                             "submartingale-z", "submartingale-y"])
    sp.add_argument("--points", default=None)
    sp.add_argument("--lam", type=float, default=50.0)
    sp.add_argument("--m", type=int, default=None,
                    help="restrict the hypercontractive suite to one moment")
    sp.add_argument("--n", type=int, default=None,
                    help="weight support size for hypercontractive (default --x-max)")
    sp.set_defaults(func=_cmd_moments)

    sp = sub.add_parser("euler", parents=[common])
    sp.add_argument("--check", required=True,
                    choices=["parseval", "product-expectation", "sigma-event"])
    sp.add_argument("--points", default=None)
    sp.set_defaults(func=_cmd_euler)

    sp = sub.add_parser("variance", parents=[common])
    sp.add_argument("--points", default=None)
    sp.set_defaults(func=_cmd_variance)

    sp = sub.add_parser("report", parents=[common])
    sp.add_argument("inputs", nargs="+")
    sp.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if hasattr(args, "threads"):
        if args.threads == "auto":
            args.threads = os.cpu_count() or 1
        else:
            try:
                args.threads = max(1, int(args.threads))
            except ValueError:
                print("rmflab: --threads must be an integer or 'auto'",
                      file=sys.stderr)
                return 2
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"rmflab: {exc}", file=sys.stderr)
        return 2
    except (MemoryError, QuadratureError) as exc:
        print(f"rmflab: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    raise SystemExit(main())
