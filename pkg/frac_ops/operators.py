"""
Atangana-Baleanu Operators
Discrete ABC/ABR derivatives and the AB integral on uniformly sampled series
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from mittag_leffler import MlfAccuracy, default_accuracy, kernel_first_moment, kernel_integral, kernel_primitive, mlf
from .context import AlphaContext
from .errors import GridError, OrderDomainError
from .series import TimeSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProductWeights:
    """Product-integration weights for a kernel g on a uniform grid

    (g * f)(t_j) ~ sum_r c[r] f[j-r] - b[j] f[0], exact for piecewise-linear f.
    """

    c: np.ndarray
    b: np.ndarray

    def apply(self, values: np.ndarray) -> np.ndarray:
        n1 = values.shape[0]
        return np.convolve(values, self.c)[:n1] - self.b[:n1] * values[0]

    def apply_transpose(self, values: np.ndarray) -> np.ndarray:
        n1 = values.shape[0]
        out = np.convolve(values[::-1], self.c)[:n1][::-1].copy()
        out[0] -= float(np.dot(self.b[:n1], values))
        return out


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=float)
    values.setflags(write=False)
    return values


@lru_cache(maxsize=512)
def product_weights(alpha: float, rate: float, dt: float, n_steps: int,
                    accuracy: Optional[MlfAccuracy] = None) -> ProductWeights:
    """
    Weights for the kernel g(s) = s^(alpha-1) E_{alpha,alpha}(-rate s^alpha).

    The kernel moments over each cell come from the closed-form primitives
    kernel_integral and kernel_first_moment, so no cancellation of nearly
    equal Mittag-Leffler values occurs for small rate * dt^alpha.
    """
    acc = accuracy or default_accuracy()
    tau = dt * np.arange(n_steps + 2, dtype=float)
    g0 = np.asarray(kernel_integral(alpha, rate, tau, acc))
    g1 = np.asarray(kernel_first_moment(alpha, rate, tau, acc))
    i0 = np.diff(g0)
    i1 = np.diff(g1)
    q = np.arange(n_steps + 1, dtype=float)
    older = (i1 - q * dt * i0) / dt
    newer = ((q + 1.0) * dt * i0 - i1) / dt
    c = newer.copy()
    c[1:] += older[:-1]
    return ProductWeights(c=_frozen(c), b=_frozen(newer))


@lru_cache(maxsize=512)
def _abc_increments(alpha: float, gamma_rate: float, dt: float, n_steps: int,
                    accuracy: Optional[MlfAccuracy] = None) -> np.ndarray:
    # P(t_{k+1}) - P(t_k) with P the exact primitive of the kernel
    acc = accuracy or default_accuracy()
    primitive = np.asarray(kernel_primitive(alpha, gamma_rate, dt * np.arange(n_steps + 1, dtype=float), acc))
    return _frozen(np.diff(primitive))


def _require_grid(u: TimeSeries) -> None:
    if u.grid.n_steps < 2:
        raise GridError(f"need at least 2 steps, got {u.grid.n_steps}")


def abc_derivative_left(u: TimeSeries, ctx: AlphaContext, accuracy: Optional[MlfAccuracy] = None) -> TimeSeries:
    """
    Caputo-type AB derivative with base point 0.

    u is taken piecewise linear and the Mittag-Leffler kernel is integrated
    exactly over every cell, so the scheme is exact for linear u.
    """
    ctx.require_derivative_order()
    _require_grid(u)
    grid = u.grid
    increments = _abc_increments(ctx.alpha, ctx.gamma_rate, grid.dt, grid.n_steps, accuracy)
    slopes = np.diff(u.values) / grid.dt
    out = np.zeros(grid.n_steps + 1)
    out[1:] = ctx.scale * np.convolve(slopes, increments)[:grid.n_steps]
    return TimeSeries(grid, out)


def abc_derivative_right(u: TimeSeries, ctx: AlphaContext, accuracy: Optional[MlfAccuracy] = None) -> TimeSeries:
    """Derivative with base point T, routed through time reversal: -D_0(u(T - .))(T - t)."""
    left = abc_derivative_left(u.reversed(), ctx, accuracy)
    return -left.reversed()


def abr_derivative_left(u: TimeSeries, ctx: AlphaContext, accuracy: Optional[MlfAccuracy] = None) -> TimeSeries:
    """Riemann-Liouville-type AB derivative: the ABC derivative plus the u(0) kernel term."""
    caputo = abc_derivative_left(u, ctx, accuracy)
    t = u.grid.nodes
    kernel = np.asarray(mlf(ctx.alpha, 1.0, -ctx.gamma_rate * t ** ctx.alpha, accuracy))
    return TimeSeries(u.grid, caputo.values + ctx.scale * u.values[0] * kernel)


def ab_integral(u: TimeSeries, ctx: AlphaContext, accuracy: Optional[MlfAccuracy] = None) -> TimeSeries:
    """
    AB fractional integral ((1-alpha)/B) u + (alpha/(B Gamma(alpha))) int_0^t u(s)(t-s)^(alpha-1) ds.

    alpha = 0 returns u and alpha = 1 the ordinary cumulative integral.
    """
    if not 0.0 <= ctx.alpha <= 1.0:
        raise OrderDomainError(f"alpha must lie in [0, 1], got {ctx.alpha}")
    _require_grid(u)
    if ctx.alpha == 0.0:
        return TimeSeries(u.grid, u.values)
    grid = u.grid
    weights = product_weights(ctx.alpha, 0.0, grid.dt, grid.n_steps, accuracy)
    b = ctx.b_of_alpha
    values = ((1.0 - ctx.alpha) / b) * u.values + (ctx.alpha / b) * weights.apply(u.values)
    return TimeSeries(grid, values)
