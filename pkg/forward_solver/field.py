"""
Space-Time Fields
Functions on (0, L) x [0, T] stored as one time series per sine mode
"""
from typing import List, Optional

import numpy as np

from frac_ops import GridError, TimeGrid, TimeSeries
from spectral import BasisMismatchError, ModalCoefficients, SpectralBasis, reconstruct


class Field:
    """Modal representation y(x, t) = sum_k values[k, j] w_k(x) at t_j

    `initial` optionally carries the datum y0 the field was solved from, so that
    residual checks can account for a jump between y0 and y(0).
    """

    def __init__(self, basis: SpectralBasis, grid: TimeGrid, values, initial: Optional[ModalCoefficients] = None):
        values = np.array(values, dtype=float)
        expected = (basis.n_modes, grid.n_steps + 1)
        if values.shape != expected:
            raise GridError(f"expected field values of shape {expected}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("field values must be finite")
        if initial is not None:
            initial.check_same_basis(basis)
        values.setflags(write=False)
        self.basis = basis
        self.grid = grid
        self.values = values
        self.initial = initial

    @classmethod
    def zeros(cls, basis: SpectralBasis, grid: TimeGrid) -> "Field":
        return cls(basis, grid, np.zeros((basis.n_modes, grid.n_steps + 1)))

    @classmethod
    def separable(cls, profile: ModalCoefficients, time_factor: TimeSeries) -> "Field":
        """g(t) * profile(x) with the profile already projected"""
        return cls(profile.basis, time_factor.grid, np.outer(profile.coeffs, time_factor.values))

    @classmethod
    def from_modal_series(cls, basis: SpectralBasis, series: List[TimeSeries]) -> "Field":
        if len(series) != basis.n_modes:
            raise BasisMismatchError(f"expected {basis.n_modes} modal series, got {len(series)}")
        grid = series[0].grid
        for s in series:
            series[0].check_same_grid(s)
        return cls(basis, grid, np.stack([s.values for s in series]))

    @property
    def modal_series(self) -> List[TimeSeries]:
        return [TimeSeries(self.grid, row) for row in self.values]

    def mode(self, k: int) -> TimeSeries:
        """Series of the k-th mode (1-based)"""
        return TimeSeries(self.grid, self.values[k - 1])

    def at_step(self, j: int) -> ModalCoefficients:
        return ModalCoefficients(self.basis, self.values[:, j])

    def reconstruct(self, x_nodes) -> np.ndarray:
        """Physical values, shape (n_steps + 1, len(x_nodes)), rows in time order"""
        return np.stack([reconstruct(self.at_step(j), x_nodes) for j in range(self.grid.n_steps + 1)])

    def check_compatible(self, other: "Field") -> None:
        if self.basis != other.basis:
            raise BasisMismatchError(f"basis mismatch: {self.basis} vs {other.basis}")
        if self.grid != other.grid:
            raise GridError(f"grid mismatch: {self.grid} vs {other.grid}")

    def with_values(self, values) -> "Field":
        return Field(self.basis, self.grid, values)

    def reversed(self) -> "Field":
        """Field evaluated at T - t"""
        return Field(self.basis, self.grid, self.values[:, ::-1])

    def __add__(self, other: "Field") -> "Field":
        self.check_compatible(other)
        return Field(self.basis, self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self.check_compatible(other)
        return Field(self.basis, self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.basis, self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.basis, self.grid, -self.values)

    def __repr__(self) -> str:
        return f"Field(n_modes={self.basis.n_modes}, n_steps={self.grid.n_steps}, T={self.grid.t_final})"
