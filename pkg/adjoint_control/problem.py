"""
Control Problem
Tracking problem data, optimizer results and the space-time inner product
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from forward_solver import Field
from frac_ops import AlphaContext, GridError, TimeGrid
from spectral import ModalCoefficients, SpectralBasis

from .errors import PreconditionError


def inner(a: Field, b: Field) -> float:
    """L2(Q) inner product: Parseval in space, trapezoid in time"""
    a.check_compatible(b)
    return float(np.dot(a.grid.trapezoid_weights, np.sum(a.values * b.values, axis=0)))


def norm(a: Field) -> float:
    return float(np.sqrt(max(inner(a, a), 0.0)))


@dataclass(frozen=True)
class ControlProblem:
    """Minimise 1/2 ||y(v) - z_d||^2 + n_reg/2 ||v||^2 subject to the state equation with forcing v + background_f"""

    basis: SpectralBasis
    grid: TimeGrid
    ctx: AlphaContext
    y0: ModalCoefficients
    z_d: Field
    n_reg: float
    background_f: Optional[Field] = None
    threads: Optional[int] = None

    def __post_init__(self):
        if not self.n_reg > 0:
            raise PreconditionError(f"n_reg must be positive, got {self.n_reg}")
        self.ctx.require_derivative_order()
        self.y0.check_same_basis(self.basis)
        for name, value in (("z_d", self.z_d), ("background_f", self.background_f)):
            if value is None:
                continue
            value.at_step(0).check_same_basis(self.basis)
            if value.grid != self.grid:
                raise GridError(f"{name} grid {value.grid} differs from problem grid {self.grid}")

    def zeros(self) -> Field:
        return Field.zeros(self.basis, self.grid)

    def forcing(self, v: Field) -> Field:
        """v plus the fixed background forcing"""
        return v if self.background_f is None else v + self.background_f


@dataclass
class OptimalityResult:
    """Optimal triple (u_hat, y_hat, eta) and the optimizer history"""

    u_hat: Field
    y_hat: Field
    eta: Field
    j_value: float
    grad_norm_history: List[float] = field(default_factory=list)
    j_history: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    tolerance: float = 0.0
    method: str = "cr"
    symmetrized_adjoint: bool = True
