"""Experiment batches: determinism, parallel equivalence, record CSV I/O."""

import numpy as np
import pytest

from glnlab.harness import (
    ExperimentSpec,
    RunRecord,
    compare,
    load_spec,
    metric_values,
    read_records,
    run_experiment,
    write_records,
    write_spec,
)
from glnlab.training import TrainConfig


def tiny_regression_spec(**overrides):
    base = dict(
        task="regression", target="ees", model="gln",
        architecture="one-hidden", repetitions=3, base_seed=5,
        train=TrainConfig(max_epochs=8, patience=100, batch_size=32),
        n_points=96, record_timing=False,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def tiny_deq_spec(**overrides):
    base = dict(
        task="deq", target="decay", model="gln",
        architecture="one-hidden", repetitions=3, base_seed=2,
        train=TrainConfig(max_epochs=10, patience=100),
        colloc_per_axis=8, record_timing=False,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_spec_validation():
    with pytest.raises(ValueError):
        tiny_regression_spec(target="nope")
    with pytest.raises(ValueError):
        tiny_regression_spec(model="rbf")
    with pytest.raises(ValueError):
        tiny_regression_spec(architecture="three-hidden")
    with pytest.raises(ValueError):
        tiny_regression_spec(target="sunspot")  # needs a path


def test_run_experiment_deterministic():
    spec = tiny_regression_spec()
    a = run_experiment(spec)
    b = run_experiment(spec)
    assert a == b
    assert [r.seed for r in a] == [5, 6, 7]


def test_deq_epochs_follow_problem_budget():
    # the solver path ignores max_epochs; the budget belongs to the problem
    records = run_experiment(tiny_deq_spec(repetitions=2))
    assert all(r.ok for r in records)
    assert all(r.epochs_run == 500 for r in records)


def test_gln_records_carry_alphas_others_do_not():
    gln = run_experiment(tiny_regression_spec(repetitions=2))
    assert all(len(r.alphas) == 1 for r in gln)
    assert all(0.0 < a < 1.0 for r in gln for a in r.alphas)
    sin = run_experiment(tiny_regression_spec(repetitions=2, model="sin"))
    assert all(r.alphas == () for r in sin)


def test_two_hidden_records_two_alphas():
    recs = run_experiment(tiny_regression_spec(repetitions=2,
                                               architecture="two-hidden"))
    assert all(len(r.alphas) == 2 for r in recs)


def test_parallel_matches_serial():
    spec = tiny_regression_spec(repetitions=4)
    serial = run_experiment(spec, jobs=1)
    parallel = run_experiment(spec, jobs=4)
    assert serial == parallel


def test_compare_self_is_similar():
    records = run_experiment(tiny_regression_spec())
    result, sa, sb = compare(records, records, "test_mse")
    assert result.d_statistic == 0.0
    assert not result.reject_at_5pct
    assert sa == sb


def test_compare_shifted_constant_batches():
    def fake(seed, value):
        return RunRecord("regression", "ees", "gln", "one-hidden", seed,
                         value, 10, (0.5,), 0.0)

    a = [fake(i, 1.0 + 0.001 * i) for i in range(5)]
    b = [fake(i, 9.0 + 0.001 * i) for i in range(5)]
    result, _, _ = compare(a, b, "test_mse")
    assert result.d_statistic == 1.0
    assert result.reject_at_5pct


def test_metric_values_excludes_failures():
    ok = RunRecord("deq", "decay", "gln", "one-hidden", 1, 0.5, 10, (), 0.0)
    bad = RunRecord("deq", "decay", "gln", "one-hidden", 2, float("nan"),
                    10, (), 0.0, status="error")
    assert metric_values([ok, bad], "test_mse") == [0.5]
    with pytest.raises(ValueError):
        metric_values([ok], "wall_time")


def test_records_csv_roundtrip(tmp_path):
    records = run_experiment(tiny_regression_spec())
    path = tmp_path / "runs.csv"
    write_records(records, path)
    assert read_records(path) == records


def test_records_csv_bytes_stable(tmp_path):
    spec = tiny_deq_spec()
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_records(run_experiment(spec), p1)
    write_records(run_experiment(spec), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_spec_config_roundtrip(tmp_path):
    spec = tiny_regression_spec()
    path = tmp_path / "exp.cfg"
    write_spec(spec, path)
    again = load_spec(path)
    assert again == spec
    assert load_spec(path, reps=7).repetitions == 7
    assert load_spec(path, seed=123).base_seed == 123
    assert load_spec(path, record_timing=False).record_timing is False


def test_load_spec_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_spec(tmp_path / "nothing.cfg")


def test_sunspot_experiment_runs(tmp_path):
    rng = np.random.default_rng(0)
    lines = [f"{1700.5 + i};{rng.uniform(0, 200):.1f};-1.0;-1;1" for i in range(60)]
    path = tmp_path / "sunspots.csv"
    path.write_text("\n".join(lines) + "\n")
    spec = ExperimentSpec(
        task="regression", target="sunspot", model="tbn",
        architecture="one-hidden", repetitions=2, base_seed=1,
        train=TrainConfig(max_epochs=6, patience=50, batch_size=16),
        sunspot_path=str(path), record_timing=False,
    )
    records = run_experiment(spec)
    assert all(r.ok for r in records)
    assert all(np.isfinite(r.test_mse) for r in records)
