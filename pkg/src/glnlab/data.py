"""Benchmark data: two synthetic generators, the sunspot loader, and splits.

The first generator adds two Gaussian bumps to a sine wave; the second
modulates a sine by a Gaussian envelope. The real-world series is the yearly
mean sunspot number, read from a user-supplied delimited text file in the
SILSO layout (year and count as the first two fields, count -1 marking
missing years).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EesParams:
    e1: float = 1.2
    e2: float = 0.9
    a: float = 5.0
    sigma: float = 0.5
    omega: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class SeParams:
    e1: float = 1.0
    sigma: float = 2.0
    omega: float = 6.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def ees(x, p: EesParams = EesParams()):
    """Two Gaussian bumps riding on a sine."""
    x = np.asarray(x, dtype=np.float64)
    two_var = 2.0 * p.sigma**2
    return (p.e1 * np.exp(-((x - p.a) ** 2) / two_var)
            + p.e2 * np.exp(-(x**2) / two_var)
            + np.sin(p.omega * x))


def se(x, p: SeParams = SeParams()):
    """Sine under a Gaussian envelope; odd in x."""
    x = np.asarray(x, dtype=np.float64)
    return p.e1 * np.sin(p.omega * x) * np.exp(-(x**2) / (2.0 * p.sigma**2))


GENERATORS = {"ees": ees, "se": se}


def sample_domain(n: int, lo: float, hi: float, generator=ees) -> np.ndarray:
    """Equispaced (x, y) pairs over [lo, hi], endpoints included.

    Returns an array of shape (2, n): row 0 inputs, row 1 targets.
    """
    if n < 2:
        raise ValueError("need at least two points")
    if not lo < hi:
        raise ValueError("lo must be below hi")
    x = np.linspace(lo, hi, n)
    return np.stack([x, generator(x)])


@dataclass(frozen=True)
class DataSplit:
    train: np.ndarray       # (2, n_train)
    validation: np.ndarray  # (2, n_val)
    test: np.ndarray        # (2, n_test)
    split_seed: int


def split(data: np.ndarray, seed: int) -> DataSplit:
    """Seeded shuffle, then contiguous 50/25/25 partition of the shuffled order."""
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[1]
    if n < 4:
        raise ValueError("need at least 4 points to split")
    order = np.random.default_rng(seed).permutation(n)
    n_train = (n + 1) // 2
    n_val = (n - n_train + 1) // 2
    idx_train = order[:n_train]
    idx_val = order[n_train:n_train + n_val]
    idx_test = order[n_train + n_val:]
    return DataSplit(data[:, idx_train], data[:, idx_val], data[:, idx_test], seed)


MISSING_COUNT = -1.0


class SunspotFormatError(ValueError):
    pass


def load_sunspot(path) -> np.ndarray:
    """Yearly records as a (2, n) array: decimal year, mean count.

    Accepts semicolon- or whitespace-separated fields; anything past the
    first two fields is ignored. Records with the count sentinel -1 (missing
    year) are skipped. Raises on unreadable files, unparsable lines (with
    the line number), or an empty result.
    """
    years, counts, skipped = [], [], 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.replace(";", " ").split()
            if len(fields) < 2:
                raise SunspotFormatError(f"line {lineno}: fewer than two fields")
            try:
                year = float(fields[0])
                count = float(fields[1])
            except ValueError:
                raise SunspotFormatError(
                    f"line {lineno}: non-numeric year/count in {line!r}") from None
            if count == MISSING_COUNT:
                skipped += 1
                continue
            years.append(year)
            counts.append(count)
    if not years:
        raise SunspotFormatError(f"{path}: no usable records")
    if skipped:
        warnings.warn(f"{path}: skipped {skipped} record(s) with missing counts",
                      stacklevel=2)
    return np.stack([np.asarray(years, dtype=np.float64),
                     np.asarray(counts, dtype=np.float64)])


@dataclass(frozen=True)
class AffinePair:
    """x -> scale * x + shift, with its exact inverse."""

    scale: float
    shift: float

    def apply(self, v):
        return self.scale * np.asarray(v) + self.shift

    def invert(self, v):
        return (np.asarray(v) - self.shift) / self.scale


def _affine_to(lo_src, hi_src, lo_dst, hi_dst) -> AffinePair:
    if hi_src == lo_src:
        raise ValueError("degenerate range: all values equal")
    scale = (hi_dst - lo_dst) / (hi_src - lo_src)
    return AffinePair(scale, lo_dst - scale * lo_src)


def normalize_sunspot(records: np.ndarray) -> tuple[np.ndarray, AffinePair, AffinePair]:
    """Map years onto [-1, 1] and counts onto [0, 1].

    Returns the scaled (2, n) array with both transforms, whose inverses
    recover the original values to rounding.
    """
    records = np.asarray(records, dtype=np.float64)
    if records.size == 0:
        raise ValueError("no records to normalize")
    years, counts = records
    year_map = _affine_to(years.min(), years.max(), -1.0, 1.0)
    count_map = _affine_to(counts.min(), counts.max(), 0.0, 1.0)
    return np.stack([year_map.apply(years), count_map.apply(counts)]), year_map, count_map


def export_xy(data: np.ndarray, path) -> None:
    """Write a (2, n) array as CSV with header x,y and exact decimal floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for x, y in data.T:
            writer.writerow([repr(float(x)), repr(float(y))])
