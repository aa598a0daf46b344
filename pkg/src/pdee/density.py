"""Density snapshots on a shared uniform evaluation grid, plus CSV export."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["DensityField", "DensityTrajectory", "write_density_csv"]


@dataclass(frozen=True)
class DensityField:
    """Density values sampled on a uniform grid at one time."""

    grid: np.ndarray
    values: np.ndarray
    time: float

    def __post_init__(self):
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have the same shape")

    @property
    def dx(self) -> float:
        return float(self.grid[1] - self.grid[0])


@dataclass
class DensityTrajectory:
    """Snapshots at requested times plus mass diagnostics and run metadata."""

    snapshots: list[DensityField] = field(default_factory=list)
    mass_history: list[float] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def at(self, time: float, atol: float = 1e-9) -> DensityField:
        for snap in self.snapshots:
            if abs(snap.time - time) <= atol * max(1.0, abs(time)):
                return snap
        raise KeyError(f"no snapshot at t = {time}")

    @property
    def times(self) -> list[float]:
        return [s.time for s in self.snapshots]


def write_density_csv(path, fld: DensityField) -> None:
    """Two columns x, p; floats via repr so reruns are byte-identical."""
    with open(path, "w") as fh:
        fh.write("x,p\n")
        for x, p in zip(fld.grid, fld.values):
            fh.write(f"{float(x)!r},{float(p)!r}\n")
