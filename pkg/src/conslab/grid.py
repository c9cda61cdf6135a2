"""Uniform 1-D grids and the sampled-value carriers every solver exchanges."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, NonFinite


@dataclass(frozen=True)
class Grid1D:
    """Uniform node grid on ``[x_min, x_max]`` with ``n_cells + 1`` nodes."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min={self.x_min} must be below x_max={self.x_max}")
        if self.n_cells < 8:
            raise ValueError(f"n_cells={self.n_cells} must be at least 8")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, h: float) -> "Grid1D":
        n = int(round((x_max - x_min) / h))
        return cls(x_min, x_min + n * h, n)


@dataclass(frozen=True)
class GridFunction:
    """Values of a solution (or potential) at the nodes of ``grid`` at ``time``."""

    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_cells + 1,):
            raise GridMismatch(
                f"expected {self.grid.n_cells + 1} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFinite("grid function has non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def __call__(self, x):
        """Piecewise-linear evaluation, constant beyond the ends."""
        return np.interp(x, self.grid.nodes, self.values)

    def resample(self, grid: Grid1D) -> "GridFunction":
        # linear interpolation is monotone, so no new extrema appear
        return GridFunction(grid, np.interp(grid.nodes, self.grid.nodes, self.values), self.time)

    @classmethod
    def from_callable(cls, grid: Grid1D, func, time: float = 0.0) -> "GridFunction":
        return cls(grid, np.asarray(func(grid.nodes), dtype=float) * np.ones(grid.n_cells + 1), time)


@dataclass(frozen=True)
class SampledFunction:
    """Ordinates on a strictly increasing abscissa grid.

    Evaluation interpolates linearly and clamps to the endpoint values
    outside the grid.
    """

    grid: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise GridMismatch("grid and values must be 1-D arrays of equal length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("abscissae must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise NonFinite("sampled function has non-finite values")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)


def l1_distance(f: GridFunction, g: GridFunction) -> float:
    """Discrete L1 distance ``sum |f - g| dx`` on a shared grid.

    End nodes carry half weight (nodal trapezoid rule), so a unit
    difference on ``[0, 2]`` measures exactly 2.
    """
    if f.grid != g.grid:
        raise GridMismatch("resample onto a common grid before measuring distance")
    d = np.abs(f.values - g.values)
    return float((np.sum(d) - 0.5 * (d[0] + d[-1])) * f.grid.dx)


def sup_distance(f: GridFunction, g: GridFunction) -> float:
    if f.grid != g.grid:
        raise GridMismatch("resample onto a common grid before measuring distance")
    return float(np.max(np.abs(f.values - g.values)))
