"""Seeded multi-run experiments: spec parsing, batch execution, CSV records.

Repetition i of an experiment derives every random stream (weight init,
data split, shuffling, collocation) from base_seed + i, so batches are
reproducible run-to-run and identical whether repetitions execute serially
or on a worker pool.
"""

from __future__ import annotations

import configparser
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import data as datamod
from . import deq as deqmod
from .network import init_model
from .stats import KsResult, SampleStats, describe, ks_two_sample
from .training import TrainConfig, train_supervised

REGRESSION_DATASETS = ("ees", "se", "sunspot")
MODEL_KINDS = ("gln", "sin", "tanh", "tbn")
ARCHITECTURES = ("one-hidden", "two-hidden")

CSV_COLUMNS = [
    "task", "dataset_or_problem", "model", "architecture", "seed",
    "test_mse", "epochs_run", "alpha_1", "alpha_2", "wall_time_s", "status",
]


@dataclass(frozen=True)
class ExperimentSpec:
    task: str                      # "regression" | "deq"
    target: str                    # dataset name or problem name
    model: str                     # gln | sin | tanh | tbn
    architecture: str              # one-hidden | two-hidden
    repetitions: int = 30
    base_seed: int = 0
    train: TrainConfig = TrainConfig()
    n_points: int = 2000
    lo: float = -10.0
    hi: float = 10.0
    colloc_per_axis: int = 32
    sunspot_path: str | None = None
    record_timing: bool = True

    def __post_init__(self):
        if self.task not in ("regression", "deq"):
            raise ValueError(f"unknown task kind: {self.task!r}")
        if self.task == "regression" and self.target not in REGRESSION_DATASETS:
            raise ValueError(f"unknown dataset: {self.target!r}")
        if self.task == "deq" and self.target not in deqmod.PROBLEM_NAMES:
            raise ValueError(f"unknown problem: {self.target!r}")
        if self.model not in MODEL_KINDS:
            raise ValueError(f"unknown model: {self.model!r}")
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture: {self.architecture!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.task == "regression" and self.target == "sunspot" \
                and not self.sunspot_path:
            raise ValueError("sunspot experiments need sunspot_path")

    @property
    def input_dim(self) -> int:
        if self.task == "regression":
            return 1
        return deqmod.get_problem(self.target).input_dim

    def shape(self) -> list[int]:
        hidden = [20] if self.architecture == "one-hidden" else [20, 20]
        return [self.input_dim] + hidden + [1]


@dataclass(frozen=True)
class RunRecord:
    task: str
    dataset_or_problem: str
    model: str
    architecture: str
    seed: int
    test_mse: float
    epochs_run: int
    alphas: tuple[float, ...]
    wall_time_s: float
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _load_regression_source(spec: ExperimentSpec) -> np.ndarray:
    if spec.target == "sunspot":
        records = datamod.load_sunspot(spec.sunspot_path)
        scaled, _, _ = datamod.normalize_sunspot(records)
        return scaled
    gen = datamod.GENERATORS[spec.target]
    return datamod.sample_domain(spec.n_points, spec.lo, spec.hi, generator=gen)


def _run_one(spec: ExperimentSpec, rep: int) -> RunRecord:
    seed = spec.base_seed + rep
    cfg = replace(spec.train, seed=seed)
    started = time.perf_counter()

    if spec.task == "regression":
        source = _load_regression_source(spec)
        parts = datamod.split(source, seed)
        net = init_model(spec.model, spec.shape(), seed)
        outcome = train_supervised(
            net,
            (parts.train[:1], parts.train[1:]),
            (parts.validation[:1], parts.validation[1:]),
            cfg,
        )
        if outcome.failed:
            test_mse = math.nan
        else:
            preds = outcome.best_model.forward(parts.test[:1])
            test_mse = float(np.mean((np.asarray(preds).ravel() - parts.test[1]) ** 2))
    else:
        problem = deqmod.get_problem(spec.target)
        colloc = deqmod.make_collocation(problem, spec.colloc_per_axis, seed)
        net = init_model(spec.model, spec.shape(), seed)
        outcome = deqmod.solve(net, problem, colloc, cfg)
        test_mse = math.nan if outcome.failed \
            else deqmod.eval_error(outcome.best_model, problem)[0]

    wall = time.perf_counter() - started if spec.record_timing else 0.0
    alphas = tuple(a for _, a in outcome.best_model.alphas())
    status = "error" if (outcome.failed or not math.isfinite(test_mse)) else "ok"
    return RunRecord(
        task=spec.task,
        dataset_or_problem=spec.target,
        model=spec.model,
        architecture=spec.architecture,
        seed=seed,
        test_mse=test_mse,
        epochs_run=outcome.epochs_run,
        alphas=alphas,
        wall_time_s=wall,
        status=status,
    )


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> list[RunRecord]:
    """Execute all repetitions; records come back ordered by seed.

    With jobs > 1 repetitions fan out to a process pool; each worker owns
    its run exclusively, and results are identical to serial execution.
    """
    reps = range(spec.repetitions)
    if jobs <= 1:
        records = [_run_one(spec, i) for i in reps]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, [spec] * spec.repetitions, reps))
    return sorted(records, key=lambda r: r.seed)


def metric_values(records, metric: str) -> list[float]:
    ok = [r for r in records if r.ok]
    if metric == "test_mse":
        return [r.test_mse for r in ok]
    if metric == "epochs_run":
        return [float(r.epochs_run) for r in ok]
    raise ValueError(f"unknown metric: {metric!r}")


def compare(records_a, records_b, metric: str) -> tuple[KsResult, SampleStats, SampleStats]:
    """KS test plus both descriptive summaries for one metric."""
    va, vb = metric_values(records_a, metric), metric_values(records_b, metric)
    if len(va) < 2 or len(vb) < 2:
        raise ValueError("need at least two successful runs per side")
    return ks_two_sample(va, vb), describe(va), describe(vb)


# -- CSV records --------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_records(records, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            a1 = _fmt(r.alphas[0]) if len(r.alphas) > 0 else ""
            a2 = _fmt(r.alphas[1]) if len(r.alphas) > 1 else ""
            writer.writerow([
                r.task, r.dataset_or_problem, r.model, r.architecture,
                str(r.seed), _fmt(r.test_mse), str(r.epochs_run),
                a1, a2, _fmt(r.wall_time_s), r.status,
            ])


def read_records(path) -> list[RunRecord]:
    import csv

    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected run-record header")
        for row in reader:
            vals = dict(zip(CSV_COLUMNS, row))
            alphas = tuple(float(vals[k]) for k in ("alpha_1", "alpha_2") if vals[k])
            out.append(RunRecord(
                task=vals["task"],
                dataset_or_problem=vals["dataset_or_problem"],
                model=vals["model"],
                architecture=vals["architecture"],
                seed=int(vals["seed"]),
                test_mse=float(vals["test_mse"]),
                epochs_run=int(vals["epochs_run"]),
                alphas=alphas,
                wall_time_s=float(vals["wall_time_s"]),
                status=vals["status"],
            ))
    return out


# -- config files --------------------------------------------------------------

def load_spec(path, *, reps: int | None = None, seed: int | None = None,
              record_timing: bool | None = None) -> ExperimentSpec:
    """Read a sectioned key-value experiment config, with CLI overrides."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config not found: {path}")

    task = parser.get("task", "kind")
    if task == "regression":
        target = parser.get("task", "dataset")
    else:
        target = parser.get("task", "problem")

    train = TrainConfig(
        learning_rate=parser.getfloat("train", "learning_rate", fallback=1e-3),
        batch_size=parser.getint("train", "batch_size", fallback=64),
        max_epochs=parser.getint("train", "max_epochs", fallback=200_000),
        patience=parser.getint("train", "patience", fallback=30),
    )

    spec = ExperimentSpec(
        task=task,
        target=target,
        model=parser.get("model", "kind"),
        architecture=parser.get("model", "architecture"),
        repetitions=parser.getint("run", "repetitions", fallback=30),
        base_seed=parser.getint("run", "base_seed", fallback=0),
        train=train,
        n_points=parser.getint("data", "n_points", fallback=2000),
        lo=parser.getfloat("data", "lo", fallback=-10.0),
        hi=parser.getfloat("data", "hi", fallback=10.0),
        colloc_per_axis=parser.getint("data", "colloc_per_axis", fallback=32),
        sunspot_path=parser.get("data", "sunspot_path", fallback=None),
        record_timing=parser.getboolean("run", "record_timing", fallback=True),
    )
    if reps is not None:
        spec = replace(spec, repetitions=reps)
    if seed is not None:
        spec = replace(spec, base_seed=seed)
    if record_timing is not None:
        spec = replace(spec, record_timing=record_timing)
    return spec


def write_spec(spec: ExperimentSpec, path) -> None:
    """Emit the canonical config-file form of a spec."""
    parser = configparser.ConfigParser()
    parser["task"] = {"kind": spec.task}
    if spec.task == "regression":
        parser["task"]["dataset"] = spec.target
    else:
        parser["task"]["problem"] = spec.target
    parser["model"] = {"kind": spec.model, "architecture": spec.architecture}
    parser["run"] = {
        "repetitions": str(spec.repetitions),
        "base_seed": str(spec.base_seed),
        "record_timing": str(spec.record_timing).lower(),
    }
    parser["train"] = {
        "learning_rate": repr(spec.train.learning_rate),
        "batch_size": str(spec.train.batch_size),
        "max_epochs": str(spec.train.max_epochs),
        "patience": str(spec.train.patience),
    }
    parser["data"] = {
        "n_points": str(spec.n_points),
        "lo": repr(spec.lo),
        "hi": repr(spec.hi),
        "colloc_per_axis": str(spec.colloc_per_axis),
    }
    if spec.sunspot_path:
        parser["data"]["sunspot_path"] = spec.sunspot_path
    with open(path, "w") as fh:
        parser.write(fh)
