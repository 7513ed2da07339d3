"""
Modal Forward Solver
Solves D^alpha y - y'' = f with Dirichlet conditions mode by mode through the
Mittag-Leffler representation of each scalar fractional ODE
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import rgamma

from config import Config
from frac_ops import (
    AlphaContext,
    GridError,
    ProductWeights,
    TimeGrid,
    TimeSeries,
    abc_derivative_left,
    product_weights,
)
from mittag_leffler import MlfAccuracy, default_accuracy, mlf
from spectral import BasisMismatchError, ModalCoefficients, SpectralBasis

from .errors import NumericalError
from .field import Field

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModalConstants:
    """Per-eigenvalue constants of the representation formula"""

    lambda_i: float
    gamma_i: float
    zeta_i: float
    k_i: float
    source_weight: float  # (1 - alpha) zeta_i / B(alpha), the instantaneous response to f


def modal_constants(lambda_i: float, ctx: AlphaContext, gamma_weighted_k: bool = False) -> ModalConstants:
    """
    Constants gamma_i, zeta_i and k_i for one eigenvalue.

    Args:
        lambda_i: Eigenvalue, lambda_i > 0
        ctx: Order context with alpha in (0, 1)
        gamma_weighted_k: Use K_i = alpha zeta/(B Gamma(alpha)) + (1-alpha) gamma_i zeta / B
            instead of k_i = alpha zeta^2 / B. Diagnostic only; it breaks the
            lambda -> 0 limit and the constant-forcing steady state.

    Returns:
        ModalConstants for lambda_i
    """
    ctx.require_derivative_order()
    if not lambda_i > 0:
        raise GridError(f"lambda_i must be positive, got {lambda_i}")
    alpha, b = ctx.alpha, ctx.b_of_alpha
    denom = b + (1.0 - alpha) * lambda_i
    gamma_i = alpha * lambda_i / denom
    zeta_i = b / denom
    if gamma_weighted_k:
        k_i = alpha * zeta_i * float(rgamma(alpha)) / b + (1.0 - alpha) * gamma_i * zeta_i / b
    else:
        k_i = alpha * zeta_i ** 2 / b
    return ModalConstants(
        lambda_i=float(lambda_i),
        gamma_i=gamma_i,
        zeta_i=zeta_i,
        k_i=k_i,
        source_weight=(1.0 - alpha) * zeta_i / b,
    )


@dataclass(frozen=True)
class ModalPropagator:
    """Discrete solution operator of one mode on one grid

    y = decay * y0 + source_weight * f + k_i * weights.apply(f)
    """

    constants: ModalConstants
    decay: np.ndarray
    weights: ProductWeights

    def apply(self, y0_i: float, f_values: np.ndarray) -> np.ndarray:
        mc = self.constants
        return self.decay * y0_i + mc.source_weight * f_values + mc.k_i * self.weights.apply(f_values)

    def apply_source_transpose(self, values: np.ndarray) -> np.ndarray:
        """Transpose of the linear map f -> y (zero initial data) in the Euclidean pairing"""
        mc = self.constants
        return mc.source_weight * values + mc.k_i * self.weights.apply_transpose(values)


@lru_cache(maxsize=1024)
def modal_propagator(lambda_i: float, ctx: AlphaContext, grid: TimeGrid, gamma_weighted_k: bool = False,
                     accuracy: Optional[MlfAccuracy] = None) -> ModalPropagator:
    """Kernel tables for one mode, cached per (lambda_i, alpha, grid)"""
    acc = accuracy or default_accuracy()
    mc = modal_constants(lambda_i, ctx, gamma_weighted_k)
    t_alpha = grid.nodes ** ctx.alpha
    decay = mc.zeta_i * np.asarray(mlf(ctx.alpha, 1.0, -mc.gamma_i * t_alpha, acc))
    decay.setflags(write=False)
    weights = product_weights(ctx.alpha, mc.gamma_i, grid.dt, grid.n_steps, acc)
    return ModalPropagator(constants=mc, decay=decay, weights=weights)


def solve_modal(y0_i: float, f_i: TimeSeries, mc: ModalConstants, ctx: AlphaContext,
                accuracy: Optional[MlfAccuracy] = None) -> TimeSeries:
    """
    Scalar solution y_i(t) = zeta E_alpha(-gamma_i t^alpha) y0_i + source_weight f_i(t)
    + k_i int_0^t (t-s)^(alpha-1) E_{alpha,alpha}(-gamma_i (t-s)^alpha) f_i(s) ds.

    The convolution is product integration with f_i piecewise linear and the
    kernel moments integrated exactly per cell.
    """
    acc = accuracy or default_accuracy()
    grid = f_i.grid
    t_alpha = grid.nodes ** ctx.alpha
    decay = mc.zeta_i * np.asarray(mlf(ctx.alpha, 1.0, -mc.gamma_i * t_alpha, acc))
    weights = product_weights(ctx.alpha, mc.gamma_i, grid.dt, grid.n_steps, acc)
    values = ModalPropagator(constants=mc, decay=decay, weights=weights).apply(float(y0_i), f_i.values)
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"non-finite modal solution for lambda={mc.lambda_i}")
    return TimeSeries(grid, values)


def _thread_count(threads: Optional[int]) -> int:
    count = threads if threads is not None else Config.ABC_CONTROL_THREADS
    return max(1, int(count))


def map_modes(fn, n_modes: int, threads: Optional[int] = None) -> list:
    """Evaluate fn(index) for every mode, gathered in ascending mode order"""
    workers = _thread_count(threads)
    if workers == 1 or n_modes == 1:
        return [fn(i) for i in range(n_modes)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, range(n_modes)))


def _check_forcing(basis: SpectralBasis, grid: TimeGrid, f: Optional[Field]) -> np.ndarray:
    if f is None:
        return np.zeros((basis.n_modes, grid.n_steps + 1))
    if f.basis != basis:
        raise BasisMismatchError(f"forcing basis {f.basis} differs from {basis}")
    if f.grid != grid:
        raise GridError(f"forcing grid {f.grid} differs from solver grid {grid}")
    return f.values


def solve_forward(y0: ModalCoefficients, f: Optional[Field], ctx: AlphaContext, grid: TimeGrid,
                  threads: Optional[int] = None, gamma_weighted_k: bool = False,
                  accuracy: Optional[MlfAccuracy] = None) -> Field:
    """
    Series solution of the diffusion problem, one independent scalar solve per mode.

    Args:
        y0: Initial datum in modal form
        f: Forcing field on (basis, grid); None means f = 0
        ctx: Order context
        grid: Time grid
        threads: Worker count; defaults to Config.ABC_CONTROL_THREADS

    Returns:
        Field carrying y0 as its initial datum
    """
    ctx.require_derivative_order()
    basis = y0.basis
    forcing = _check_forcing(basis, grid, f)
    lambdas = basis.eigenvalues

    def solve_one(i: int) -> np.ndarray:
        propagator = modal_propagator(float(lambdas[i]), ctx, grid, gamma_weighted_k, accuracy)
        return propagator.apply(float(y0.coeffs[i]), forcing[i])

    rows = map_modes(solve_one, basis.n_modes, threads)
    values = np.stack(rows)
    if not np.all(np.isfinite(values)):
        raise NumericalError("forward solve produced non-finite values")
    logger.debug(f"forward solve: {basis.n_modes} modes, {grid.n_steps} steps, alpha={ctx.alpha}")
    return Field(basis, grid, values, initial=y0)


def initial_jump(y: Field) -> np.ndarray:
    """y_i(0) - y0_i per mode; zero when the data is compatible (f_i(0) = lambda_i y0_i)"""
    if y.initial is None:
        return np.zeros(y.basis.n_modes)
    return y.values[:, 0] - y.initial.coeffs


def modal_residuals(y: Field, f: Optional[Field], ctx: AlphaContext,
                    accuracy: Optional[MlfAccuracy] = None) -> np.ndarray:
    """
    Discrete L2(0, T) norm per mode of D^alpha y_i + lambda_i y_i - f_i, first node excluded.

    When the field carries its initial datum, the jump y_i(0) - y0_i enters the
    derivative through its exact contribution B/(1-alpha) * jump * E_alpha(-gamma t^alpha).
    """
    forcing = _check_forcing(y.basis, y.grid, f)
    grid = y.grid
    jump = initial_jump(y)
    kernel = np.asarray(mlf(ctx.alpha, 1.0, -ctx.gamma_rate * grid.nodes ** ctx.alpha, accuracy))
    weights = np.array(grid.trapezoid_weights)
    weights[0] = 0.0

    out = np.empty(y.basis.n_modes)
    for i, lam in enumerate(y.basis.eigenvalues):
        series = TimeSeries(grid, y.values[i])
        derivative = abc_derivative_left(series, ctx, accuracy).values + ctx.scale * jump[i] * kernel
        r = derivative + lam * y.values[i] - forcing[i]
        out[i] = np.sqrt(np.sum(weights * r ** 2))
    return out


def residual(y: Field, f: Optional[Field], ctx: AlphaContext, accuracy: Optional[MlfAccuracy] = None) -> float:
    """Largest modal residual, see modal_residuals"""
    return float(np.max(modal_residuals(y, f, ctx, accuracy)))
