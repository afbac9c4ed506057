"""Command-line interface.

Subcommands: gen-data, run, stats, ks, solve, alphas. Usage problems
(unknown flags, missing files, invalid specs) exit with code 2 and a
one-line diagnostic; runtime failures exit with 1.
"""

from __future__ import annotations

import argparse
import configparser
import sys

from . import data as datamod
from . import deq as deqmod
from . import harness, stats
from .network import init_model
from .training import TrainConfig

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glnlab",
        description="Regression and differential-equation benchmarks for "
                    "networks with a trainable sine/tanh activation mix.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a generated data set as CSV")
    p.add_argument("--set", dest="dataset", required=True, choices=["ees", "se"])
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--lo", type=float, default=-10.0)
    p.add_argument("--hi", type=float, default=10.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run a seeded multi-repetition experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true",
                   help="write wall_time_s as 0.0 for byte-stable output")

    p = sub.add_parser("stats", help="descriptive statistics of a run CSV")
    p.add_argument("--runs", required=True)
    p.add_argument("--metric", default="test_mse",
                   choices=["test_mse", "epochs_run"])
    p.add_argument("--out", required=True)

    p = sub.add_parser("ks", help="two-sample KS test between two run CSVs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--metric", default="test_mse",
                   choices=["test_mse", "epochs_run"])
    p.add_argument("--out", default=None)

    p = sub.add_parser("solve", help="single differential-equation run "
                                     "with a solution-grid export")
    p.add_argument("--problem", required=True, choices=list(deqmod.PROBLEM_NAMES))
    p.add_argument("--model", default="gln", choices=list(harness.MODEL_KINDS))
    p.add_argument("--arch", default="one-hidden", choices=list(harness.ARCHITECTURES))
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("alphas", help="per-layer gate-weight summaries of a run CSV")
    p.add_argument("--runs", required=True)
    p.add_argument("--out", required=True)
    return parser


def _cmd_gen_data(args) -> int:
    gen = datamod.GENERATORS[args.dataset]
    table = datamod.sample_domain(args.n, args.lo, args.hi, generator=gen)
    datamod.export_xy(table, args.out)
    print(f"wrote {table.shape[1]} rows to {args.out}")
    return 0


def _cmd_run(args) -> int:
    spec = harness.load_spec(args.config, reps=args.reps, seed=args.seed,
                             record_timing=False if args.no_timing else None)
    records = harness.run_experiment(spec, jobs=args.jobs)
    harness.write_records(records, args.out)
    failures = sum(not r.ok for r in records)
    note = f" ({failures} failed, excluded from stats)" if failures else ""
    print(f"wrote {len(records)} run records to {args.out}{note}")
    return 0


def _cmd_stats(args) -> int:
    records = harness.read_records(args.runs)
    groups: dict[tuple, list] = {}
    for r in records:
        if r.ok:
            groups.setdefault(
                (r.task, r.dataset_or_problem, r.model, r.architecture), []
            ).append(r)
    rows = []
    for key in sorted(groups):
        values = harness.metric_values(groups[key], args.metric)
        if len(values) >= 2:
            label = "/".join(key) + f"/{args.metric}"
            rows.append((label, stats.describe(values)))
    if not rows:
        print("no group has two successful runs", file=sys.stderr)
        return RUNTIME_ERROR
    stats.export_stats(rows, args.out)
    for label, s in rows:
        print(f"{label}: n={s.n} mean={s.mean:.6g} median={s.median:.6g} "
              f"cv={'n/a' if s.cv is None else f'{s.cv:.3f}'}")
    return 0


def _cmd_ks(args) -> int:
    rec_a = harness.read_records(args.a)
    rec_b = harness.read_records(args.b)
    result, stats_a, stats_b = harness.compare(rec_a, rec_b, args.metric)
    name_a = rec_a[0].model if rec_a else "a"
    name_b = rec_b[0].model if rec_b else "b"
    similar = "no" if result.reject_at_5pct else "yes"
    print(f"D={result.d_statistic:.6g} p={result.p_value:.6g} "
          f"similar_at_5pct={similar} ({name_a} vs {name_b}, {args.metric}, "
          f"n={result.n1}/{result.n2})")
    if args.out:
        stats.export_ks([(name_a, name_b, args.metric, result)], args.out)
    return 0


def _cmd_solve(args) -> int:
    problem = deqmod.get_problem(args.problem)
    hidden = [20] if args.arch == "one-hidden" else [20, 20]
    net = init_model(args.model, [problem.input_dim] + hidden + [1], args.seed)
    colloc = deqmod.make_collocation(problem, seed=args.seed)
    cfg = TrainConfig(seed=args.seed)
    outcome = deqmod.solve(net, problem, colloc, cfg, epochs=args.epochs)
    if outcome.failed:
        print("training failed: non-finite loss", file=sys.stderr)
        return RUNTIME_ERROR
    err, metric = deqmod.eval_error(outcome.best_model, problem)
    deqmod.export_solution(problem, outcome.best_model, args.out)
    print(f"{args.problem}: {metric}={err:.6g} epochs={outcome.epochs_run} "
          f"grid written to {args.out}")
    return 0


def _cmd_alphas(args) -> int:
    records = [r for r in harness.read_records(args.runs) if r.ok]
    rows_by_width: dict[int, list] = {}
    for r in records:
        if r.alphas:
            rows_by_width.setdefault(len(r.alphas), []).append(r.alphas)
    if not rows_by_width:
        print("no gate-weight records in input", file=sys.stderr)
        return RUNTIME_ERROR
    if len(rows_by_width) > 1:
        print("runs disagree on the number of gated layers", file=sys.stderr)
        return RUNTIME_ERROR
    rows = next(iter(rows_by_width.values()))
    summaries = stats.alpha_summary(rows)
    stats.export_stats(
        [(f"alpha_{i + 1}", s) for i, s in enumerate(summaries)], args.out)
    for i, s in enumerate(summaries, start=1):
        print(f"layer {i}: mean={s.mean:.6g} median={s.median:.6g} "
              f"std={s.std:.6g} n={s.n}")
    return 0


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "run": _cmd_run,
    "stats": _cmd_stats,
    "ks": _cmd_ks,
    "solve": _cmd_solve,
    "alphas": _cmd_alphas,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, ValueError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
