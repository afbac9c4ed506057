"""Run the regression benchmarks across all models and architectures.

Desk scale by default (the configs' 10 repetitions, 20k-epoch cap); pass
--full for the study budgets (30 repetitions, 200k-epoch cap). Writes one
run CSV per config plus descriptive statistics and the KS comparisons of
the gated model against every baseline.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from dataclasses import replace

from glnlab import harness, stats

CONFIG_DIR = pathlib.Path(__file__).resolve().parents[1] / "configs"
DATASETS = ("ees", "se", "sunspot")
MODELS = ("gln", "sin", "tanh", "tbn")


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="results/regression")
    ap.add_argument("--full", action="store_true",
                    help="30 repetitions and the 200k-epoch cap")
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--sunspot", default=None,
                    help="path to the sunspot file (skips sunspot runs if absent)")
    args = ap.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for arch in ("one-hidden", "two-hidden"):
        for dataset in DATASETS:
            if dataset == "sunspot" and not args.sunspot:
                print("skipping sunspot (no --sunspot path)")
                continue
            records_by_model = {}
            for model in MODELS:
                cfg = CONFIG_DIR / f"regression_{dataset}_{model}_{arch}.cfg"
                spec = harness.load_spec(cfg)
                if args.full:
                    spec = replace(spec, repetitions=30,
                                   train=replace(spec.train, max_epochs=200_000))
                if dataset == "sunspot":
                    spec = replace(spec, sunspot_path=args.sunspot)
                records = harness.run_experiment(spec, jobs=args.jobs)
                path = out_dir / f"{dataset}_{model}_{arch}.csv"
                harness.write_records(records, path)
                records_by_model[model] = records
                ok = [r for r in records if r.ok]
                print(f"{dataset}/{model}/{arch}: {len(ok)}/{len(records)} ok")

            rows, ks_rows = [], []
            for metric in ("test_mse", "epochs_run"):
                for model, records in records_by_model.items():
                    vals = harness.metric_values(records, metric)
                    if len(vals) >= 2:
                        rows.append((f"{dataset}/{model}/{arch}/{metric}",
                                     stats.describe(vals)))
                for other in ("sin", "tanh", "tbn"):
                    try:
                        result, _, _ = harness.compare(
                            records_by_model["gln"], records_by_model[other], metric)
                        ks_rows.append(("gln", other, metric, result))
                    except ValueError:
                        pass
            stats.export_stats(rows, out_dir / f"{dataset}_{arch}_stats.csv")
            stats.export_ks(ks_rows, out_dir / f"{dataset}_{arch}_ks.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
