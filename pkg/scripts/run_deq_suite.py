"""Run the seven differential-equation benchmarks across models.

Each problem keeps its fixed epoch budget; --full raises repetitions from
the configs' 10 to the study's 30. Writes run CSVs, descriptive statistics,
KS comparisons, and a solution grid for the best seed of each problem.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from dataclasses import replace

import numpy as np

from glnlab import deq, harness, stats
from glnlab.network import init_model
from glnlab.training import TrainConfig

CONFIG_DIR = pathlib.Path(__file__).resolve().parents[1] / "configs"
MODELS = ("gln", "sin", "tanh", "tbn")


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="results/deq")
    ap.add_argument("--full", action="store_true", help="30 repetitions")
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--problems", nargs="*", default=list(deq.PROBLEM_NAMES))
    args = ap.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for arch in ("one-hidden", "two-hidden"):
        for problem_name in args.problems:
            records_by_model = {}
            for model in MODELS:
                cfg = CONFIG_DIR / f"deq_{problem_name}_{model}_{arch}.cfg"
                spec = harness.load_spec(cfg)
                if args.full:
                    spec = replace(spec, repetitions=30)
                records = harness.run_experiment(spec, jobs=args.jobs)
                harness.write_records(
                    records, out_dir / f"{problem_name}_{model}_{arch}.csv")
                records_by_model[model] = records
                vals = harness.metric_values(records, "test_mse")
                med = np.median(vals) if vals else float("nan")
                print(f"{problem_name}/{model}/{arch}: median {med:.3e}")

            rows, ks_rows = [], []
            for model, records in records_by_model.items():
                vals = harness.metric_values(records, "test_mse")
                if len(vals) >= 2:
                    rows.append((f"{problem_name}/{model}/{arch}/test_mse",
                                 stats.describe(vals)))
            for other in ("sin", "tanh", "tbn"):
                try:
                    result, _, _ = harness.compare(
                        records_by_model["gln"], records_by_model[other], "test_mse")
                    ks_rows.append(("gln", other, "test_mse", result))
                except ValueError:
                    pass
            stats.export_stats(rows, out_dir / f"{problem_name}_{arch}_stats.csv")
            stats.export_ks(ks_rows, out_dir / f"{problem_name}_{arch}_ks.csv")

            # solution grid from the best gated run of this problem
            best = min((r for r in records_by_model["gln"] if r.ok),
                       key=lambda r: r.test_mse, default=None)
            if best is not None and arch == "one-hidden":
                problem = deq.get_problem(problem_name)
                net = init_model("gln", [problem.input_dim, 20, 1], best.seed)
                colloc = deq.make_collocation(problem, seed=best.seed)
                outcome = deq.solve(net, problem, colloc,
                                    TrainConfig(seed=best.seed))
                deq.export_solution(problem, outcome.best_model,
                                    out_dir / f"{problem_name}_solution.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
