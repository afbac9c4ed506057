"""End-to-end CLI behavior through the console entry point."""

import csv
import subprocess
import sys

import pytest

from glnlab.harness import read_records

PKG = [sys.executable, "-m", "glnlab"]


def run_cli(*args, cwd=None):
    return subprocess.run(PKG + list(args), capture_output=True, text=True, cwd=cwd)


def write_tiny_config(path, *, model="gln", reps=2):
    path.write_text(f"""[task]
kind = regression
dataset = ees

[model]
kind = {model}
architecture = one-hidden

[run]
repetitions = {reps}
base_seed = 3
record_timing = false

[train]
learning_rate = 1e-3
batch_size = 32
max_epochs = 6
patience = 50

[data]
n_points = 64
""")


def test_gen_data_writes_rows(tmp_path):
    out = tmp_path / "ees.csv"
    r = run_cli("gen-data", "--set", "ees", "--n", "2000", "--out", str(out))
    assert r.returncode == 0, r.stderr
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y"]
    assert len(rows) == 2001
    assert float(rows[1][0]) == -10.0
    assert float(rows[-1][0]) == 10.0


def test_run_writes_one_row_per_repetition(tmp_path):
    cfg = tmp_path / "exp.cfg"
    write_tiny_config(cfg, reps=3)
    out = tmp_path / "runs.csv"
    r = run_cli("run", "--config", str(cfg), "--out", str(out))
    assert r.returncode == 0, r.stderr
    records = read_records(out)
    assert len(records) == 3
    assert [rec.seed for rec in records] == [3, 4, 5]


def test_run_reps_override_and_jobs(tmp_path):
    cfg = tmp_path / "exp.cfg"
    write_tiny_config(cfg)
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    r1 = run_cli("run", "--config", str(cfg), "--out", str(serial), "--reps", "4")
    r2 = run_cli("run", "--config", str(cfg), "--out", str(parallel),
                 "--reps", "4", "--jobs", "4")
    assert r1.returncode == 0 and r2.returncode == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_stats_and_ks_and_alphas(tmp_path):
    cfg = tmp_path / "exp.cfg"
    write_tiny_config(cfg, reps=3)
    runs = tmp_path / "runs.csv"
    assert run_cli("run", "--config", str(cfg), "--out", str(runs)).returncode == 0

    stats_out = tmp_path / "stats.csv"
    r = run_cli("stats", "--runs", str(runs), "--metric", "test_mse",
                "--out", str(stats_out))
    assert r.returncode == 0, r.stderr
    assert "mean=" in r.stdout
    header = stats_out.read_text().splitlines()[0]
    assert header == "label,n,min,max,mean,median,std,cv"

    ks_out = tmp_path / "ks.csv"
    r = run_cli("ks", "--a", str(runs), "--b", str(runs),
                "--metric", "test_mse", "--out", str(ks_out))
    assert r.returncode == 0, r.stderr
    assert "D=0" in r.stdout
    assert "similar_at_5pct=yes" in r.stdout
    assert ks_out.read_text().splitlines()[0] == \
        "model_a,model_b,metric,d_statistic,p_value,reject_at_5pct"

    alphas_out = tmp_path / "alphas.csv"
    r = run_cli("alphas", "--runs", str(runs), "--out", str(alphas_out))
    assert r.returncode == 0, r.stderr
    assert "layer 1" in r.stdout


def test_alphas_errors_without_gates(tmp_path):
    cfg = tmp_path / "exp.cfg"
    write_tiny_config(cfg, model="sin")
    runs = tmp_path / "runs.csv"
    assert run_cli("run", "--config", str(cfg), "--out", str(runs)).returncode == 0
    r = run_cli("alphas", "--runs", str(runs), "--out", str(tmp_path / "a.csv"))
    assert r.returncode == 1


def test_solve_exports_grid(tmp_path):
    out = tmp_path / "grid.csv"
    r = run_cli("solve", "--problem", "decay", "--model", "tanh",
                "--epochs", "5", "--seed", "1", "--out", str(out))
    assert r.returncode == 0, r.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "t,u,analytic,error"
    assert len(lines) == 101
    assert "mse_vs_analytic=" in r.stdout


def test_usage_errors_exit_2(tmp_path):
    assert run_cli("run", "--config", str(tmp_path / "nope.cfg"),
                   "--out", str(tmp_path / "o.csv")).returncode == 2
    assert run_cli("frobnicate").returncode == 2
    assert run_cli("gen-data", "--set", "ees", "--out",
                   str(tmp_path / "x.csv"), "--unknown-flag").returncode == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("[task]\nkind = regression\ndataset = unknown_set\n"
                   "[model]\nkind = gln\narchitecture = one-hidden\n")
    assert run_cli("run", "--config", str(bad),
                   "--out", str(tmp_path / "o.csv")).returncode == 2
