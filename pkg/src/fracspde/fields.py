"""Grid containers and export helpers shared by the noise and solver modules."""

from __future__ import annotations

import csv
import json
import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = ["TimeGrid", "SpaceGrid", "GridField", "sha256_file"]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform cells on (0, t_max]: cell k is ((k) dt, (k+1) dt]."""

    t_max: float
    n: int

    def __post_init__(self):
        if self.t_max <= 0 or self.n < 1:
            raise ValueError("TimeGrid needs t_max > 0 and n >= 1")

    @property
    def dt(self) -> float:
        return self.t_max / self.n

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n + 1)

    @property
    def midpoints(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])

    @property
    def nodes(self) -> np.ndarray:
        """Right cell edges t_1..t_n (the simulation output times)."""
        return self.edges[1:]


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform cells on a box [x_min, x_max]^(per-axis), any dimension."""

    x_min: tuple
    x_max: tuple
    n: tuple

    def __post_init__(self):
        lo, hi, n = (
            tuple(np.atleast_1d(self.x_min)),
            tuple(np.atleast_1d(self.x_max)),
            tuple(int(v) for v in np.atleast_1d(self.n)),
        )
        object.__setattr__(self, "x_min", lo)
        object.__setattr__(self, "x_max", hi)
        object.__setattr__(self, "n", n)
        if not (len(lo) == len(hi) == len(n)):
            raise ValueError("x_min, x_max, n must have the same length")
        if any(h <= l for l, h in zip(lo, hi)) or any(v < 1 for v in n):
            raise ValueError("need x_min < x_max and n >= 1 on every axis")

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.n))

    @property
    def h(self) -> tuple:
        return tuple(
            (hi - lo) / k for lo, hi, k in zip(self.x_min, self.x_max, self.n)
        )

    def axis_edges(self, i: int) -> np.ndarray:
        return np.linspace(self.x_min[i], self.x_max[i], self.n[i] + 1)

    def axis_midpoints(self, i: int) -> np.ndarray:
        e = self.axis_edges(i)
        return 0.5 * (e[:-1] + e[1:])

    def midpoints(self) -> np.ndarray:
        """(n_cells, d) array of cell centres, C-order over axes."""
        axes = [self.axis_midpoints(i) for i in range(self.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))


@dataclass
class GridField:
    """Values of a space-time function on a rectangular lattice.

    ``values`` has shape (n_time, n_cells); ``meta`` records grid spec,
    seed and scheme tag so that runs are reproducible from the artifact.
    """

    values: np.ndarray
    time_grid: TimeGrid
    space_grid: SpaceGrid
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        expect = (self.time_grid.n, self.space_grid.n_cells)
        if v.shape != expect:
            raise ValueError(f"values shape {v.shape} does not match grid {expect}")
        if not np.all(np.isfinite(v)):
            raise ValueError("GridField values must all be finite")
        self.values = v

    def to_csv(self, path, times=None) -> None:
        """Rows (t, x1..xd, value), '.' decimal, UTF-8."""
        times = self.time_grid.nodes if times is None else times
        mids = self.space_grid.midpoints()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(
                ["t"] + [f"x{i + 1}" for i in range(self.space_grid.d)] + ["value"]
            )
            for it, t in enumerate(times):
                for j in range(self.space_grid.n_cells):
                    w.writerow(
                        [f"{t:.17g}"]
                        + [f"{c:.17g}" for c in mids[j]]
                        + [f"{self.values[it, j]:.17g}"]
                    )

    def summary_json(self) -> dict:
        return {
            "shape": list(self.values.shape),
            "t_max": self.time_grid.t_max,
            "n_time": self.time_grid.n,
            "x_min": list(self.space_grid.x_min),
            "x_max": list(self.space_grid.x_max),
            "n_space": list(self.space_grid.n),
            "meta": self.meta,
        }


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def dump_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
