"""
Time Grids and Sampled Series
Uniform grids on [0, T] and scalar functions of time sampled on them
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_j = j * T / n_steps, j = 0..n_steps"""

    t_final: float
    n_steps: int

    def __post_init__(self):
        if not self.t_final > 0:
            raise GridError(f"t_final must be positive, got {self.t_final}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise GridError(f"n_steps must be an integer >= 2, got {self.n_steps}")
        object.__setattr__(self, "t_final", float(self.t_final))
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(0.0, self.t_final, self.n_steps + 1)
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        weights = np.full(self.n_steps + 1, self.dt)
        weights[0] = weights[-1] = 0.5 * self.dt
        weights.setflags(write=False)
        return weights

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t_final, self.n_steps * factor)


class TimeSeries:
    """Values of a real function at the nodes of a TimeGrid"""

    def __init__(self, grid: TimeGrid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n_steps + 1,):
            raise GridError(f"expected {grid.n_steps + 1} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("time series values must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, grid: TimeGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "TimeSeries":
        return cls(grid, np.broadcast_to(fn(grid.nodes), (grid.n_steps + 1,)))

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "TimeSeries":
        return cls(grid, np.zeros(grid.n_steps + 1))

    def reversed(self) -> "TimeSeries":
        """u(T - t)"""
        return TimeSeries(self.grid, self.values[::-1])

    def check_same_grid(self, other: "TimeSeries") -> None:
        if self.grid != other.grid:
            raise GridError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: "TimeSeries") -> "TimeSeries":
        self.check_same_grid(other)
        return TimeSeries(self.grid, self.values + other.values)

    def __sub__(self, other: "TimeSeries") -> "TimeSeries":
        self.check_same_grid(other)
        return TimeSeries(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "TimeSeries":
        return TimeSeries(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "TimeSeries":
        return TimeSeries(self.grid, -self.values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"TimeSeries(T={self.grid.t_final}, n_steps={self.grid.n_steps})"
