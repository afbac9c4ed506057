"""Regenerate the canonical experiment configs under configs/.

One config per benchmark problem x model x architecture, with the scaled
desk defaults (10 repetitions; regression capped at 20k epochs). The full
study budgets (30 repetitions, 200k-epoch cap) are applied by the suite
scripts via overrides, so these files stay cheap to run as-is.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from glnlab.deq import PROBLEM_NAMES
from glnlab.harness import ARCHITECTURES, MODEL_KINDS, ExperimentSpec, write_spec
from glnlab.training import TrainConfig

REGRESSION_SETS = ("ees", "se", "sunspot")


def main() -> None:
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "configs"
    out_dir.mkdir(exist_ok=True)
    count = 0
    for model in MODEL_KINDS:
        for arch in ARCHITECTURES:
            for dataset in REGRESSION_SETS:
                spec = ExperimentSpec(
                    task="regression", target=dataset, model=model,
                    architecture=arch, repetitions=10, base_seed=1,
                    train=TrainConfig(max_epochs=20_000),
                    sunspot_path="sunspots.csv" if dataset == "sunspot" else None,
                )
                write_spec(spec, out_dir / f"regression_{dataset}_{model}_{arch}.cfg")
                count += 1
            for problem in PROBLEM_NAMES:
                spec = ExperimentSpec(
                    task="deq", target=problem, model=model,
                    architecture=arch, repetitions=10, base_seed=1,
                    train=TrainConfig(),
                )
                write_spec(spec, out_dir / f"deq_{problem}_{model}_{arch}.cfg")
                count += 1
    print(f"wrote {count} configs to {out_dir}")


if __name__ == "__main__":
    main()
