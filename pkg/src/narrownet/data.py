"""Datasets: the synthetic regression task and CSV snapshots."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .init import make_generator, normal
from .linalg import ShapeError, as_matrix, as_vector


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.array(as_matrix(self.x, "x"))
        y = np.array(as_vector(self.y, "y"))
        if x.shape[0] != y.shape[0]:
            raise ShapeError(f"x has {x.shape[0]} rows but y has {y.shape[0]} entries", x.shape, y.shape)
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


def make_synthetic(n: int, d: int, seed: int = 0) -> Dataset:
    """Gaussian inputs normalised to the unit sphere, target ``(sum_k x_k)^2``."""
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = make_generator(seed)
    x = normal(rng, (n, d), 1.0)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y = x.sum(axis=1) ** 2
    return Dataset(x, y, {"generator": "synthetic", "n": n, "d": d, "seed": int(seed)})


def save_dataset(ds: Dataset, path) -> None:
    """d feature columns followed by the target column, rows in order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{k}" for k in range(ds.d)] + ["y"])
        for xi, yi in zip(ds.x, ds.y):
            writer.writerow([repr(float(t)) for t in xi] + [repr(float(yi))])


def load_dataset(path) -> Dataset:
    rows = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    return Dataset(rows[:, :-1], rows[:, -1], {"generator": "csv", "path": str(path)})
