"""Descriptive statistics and the two-sample Kolmogorov-Smirnov test.

The KS statistic is the largest gap between the two empirical CDFs, both
evaluated with the step-right convention at every distinct merged value so
ties are handled consistently. The p-value uses the asymptotic Kolmogorov
series with the small-sample correction factor on the effective size.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SampleStats:
    n: int
    min: float
    max: float
    mean: float
    median: float
    std: float
    cv: float | None  # undefined when the mean is zero


@dataclass(frozen=True)
class KsResult:
    d_statistic: float
    p_value: float
    n1: int
    n2: int

    @property
    def reject_at_5pct(self) -> bool:
        return self.p_value < 0.05


def describe(sample) -> SampleStats:
    """min/max/mean/median plus sample (n-1) std and coefficient of variation."""
    values = np.asarray(sample, dtype=np.float64).ravel()
    if values.size < 2:
        raise ValueError("need at least two observations")
    lo, hi = float(np.min(values)), float(np.max(values))
    if lo == hi:  # constant sample: no summation noise in the moments
        mean, std = lo, 0.0
    else:
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1))
    cv = std / mean if mean != 0.0 else None
    return SampleStats(
        n=int(values.size),
        min=lo,
        max=hi,
        mean=mean,
        median=float(np.median(values)),
        std=std,
        cv=cv,
    )


def _ecdf_gap(a: np.ndarray, b: np.ndarray) -> float:
    """sup over thresholds of |F1 - F2| with right-continuous ECDFs."""
    merged = np.concatenate([a, b])
    grid = np.unique(merged)
    f1 = np.searchsorted(np.sort(a), grid, side="right") / a.size
    f2 = np.searchsorted(np.sort(b), grid, side="right") / b.size
    return float(np.max(np.abs(f1 - f2)))


def _kolmogorov_sf(lam: float) -> float:
    """2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lam^2), truncated below 1e-12.

    For tiny lam the terms decay too slowly to truncate, but the true
    survival value is 1 to machine precision there, so it is returned
    directly.
    """
    if lam < 0.05:
        return 1.0
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS test with asymptotic p-value.

    The effective size n1*n2/(n1+n2) enters through the usual correction
    lambda = D * (sqrt(ne) + 0.12 + 0.11/sqrt(ne)).
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    d = _ecdf_gap(a, b)
    sqrt_ne = math.sqrt(a.size * b.size / (a.size + b.size))
    lam = d * (sqrt_ne + 0.12 + 0.11 / sqrt_ne)
    p = _kolmogorov_sf(lam)
    return KsResult(d_statistic=d, p_value=p, n1=int(a.size), n2=int(b.size))


def alpha_summary(alpha_rows) -> list[SampleStats]:
    """Per-layer stats over repeated runs' gate weights.

    `alpha_rows`: one sequence of per-layer alpha values per run. All runs
    must expose the same number of layers (same architecture).
    """
    rows = [tuple(float(a) for a in row) for row in alpha_rows]
    if not rows:
        raise ValueError("no runs given")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("runs disagree on the number of gated layers")
    return [describe([r[i] for r in rows]) for i in range(width)]


def export_stats(rows, path) -> None:
    """CSV of labelled SampleStats rows: (label, stats) pairs."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "n", "min", "max", "mean", "median", "std", "cv"])
        for label, s in rows:
            cv = "" if s.cv is None else repr(s.cv)
            writer.writerow([label, s.n, repr(s.min), repr(s.max), repr(s.mean),
                             repr(s.median), repr(s.std), cv])


def export_ks(rows, path) -> None:
    """CSV of labelled KS results: (model_a, model_b, metric, KsResult) tuples."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model_a", "model_b", "metric", "d_statistic",
                         "p_value", "reject_at_5pct"])
        for model_a, model_b, metric, r in rows:
            writer.writerow([model_a, model_b, metric, repr(r.d_statistic),
                             repr(r.p_value), str(r.reject_at_5pct).lower()])
