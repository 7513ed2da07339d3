"""
A Priori Estimates
Computable constants of the well-posedness bounds and checks of solved fields against them
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from frac_ops import AlphaContext, TimeGrid
from mittag_leffler import MlfAccuracy, mlf_bound_constant
from spectral import ModalCoefficients, SpectralBasis, norms

from .field import Field

logger = logging.getLogger(__name__)

_BOUND_Z_MAX = 1e6
_BOUND_PROBES = 200


@dataclass(frozen=True)
class AprioriConstants:
    c_mlf: float
    c1: float
    c2: float
    c3: float
    c4: float
    lambda_big_1: float
    lambda_big_2: float
    lambda_big_3: float
    lambda_big_4: float
    t_final: float


@dataclass(frozen=True)
class BoundCheck:
    """One measured norm against its bound"""

    name: str
    measured: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.measured <= self.bound

    @property
    def slack_ratio(self) -> float:
        """measured / bound; 0 for an identically zero bound"""
        return self.measured / self.bound if self.bound > 0 else 0.0


@dataclass(frozen=True)
class AprioriReport:
    checks: List[BoundCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def by_name(self, name: str) -> BoundCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)


def apriori_constants(ctx: AlphaContext, basis: SpectralBasis, grid: TimeGrid,
                      accuracy: Optional[MlfAccuracy] = None) -> AprioriConstants:
    """
    Constants C1..C4 and Lambda1..Lambda4 of the well-posedness theorem and its corollaries.

    C is the larger empirical Mittag-Leffler bound constant for beta = 1 and beta = alpha.
    """
    ctx.require_derivative_order()
    alpha, b, t = ctx.alpha, ctx.b_of_alpha, grid.t_final
    lam1 = float(basis.eigenvalues[0])
    c = max(
        mlf_bound_constant(alpha, 1.0, _BOUND_Z_MAX, _BOUND_PROBES, accuracy).c_constant,
        mlf_bound_constant(alpha, alpha, _BOUND_Z_MAX, _BOUND_PROBES, accuracy).c_constant,
    )
    g = float(gamma_fn(alpha))
    gamma_factor = (g ** 2 + 1.0) / g ** 2
    c1 = (c * b / (1.0 - alpha)) * math.sqrt(6.0 * t / lam1)
    c2 = math.sqrt(6.0 * b ** 2 / ((1.0 - alpha) ** 2 * lam1) + 12.0 * c ** 2 * t ** 2 * gamma_factor / lam1)
    c3 = c * b * math.sqrt(6.0 * t) / (lam1 * (1.0 - alpha))
    c4 = math.sqrt(6.0 / lam1 ** 2 + 12.0 * c ** 2 * t ** 2 * gamma_factor / lam1 ** 2)
    constants = AprioriConstants(
        c_mlf=c,
        c1=c1,
        c2=c2,
        c3=c3,
        c4=c4,
        lambda_big_1=max(c1, c2),
        lambda_big_2=max(c3, c4),
        lambda_big_3=c * b * math.sqrt(t) / (1.0 - alpha),
        lambda_big_4=math.sqrt(2.0 + 4.0 * c ** 2 * t ** 2 * (1.0 + 1.0 / g ** 2)),
        t_final=t,
    )
    logger.info(f"a priori constants alpha={alpha}: C={c:.6g}, Lambda1={constants.lambda_big_1:.6g}, "
                f"Lambda2={constants.lambda_big_2:.6g}")
    return constants


def space_time_norm(values: np.ndarray, grid: TimeGrid, spatial_weight: Optional[np.ndarray] = None) -> float:
    """sqrt(int_0^T sum_i w_i v_i(t)^2 dt) with trapezoid in time"""
    squares = values ** 2 if spatial_weight is None else spatial_weight[:, None] * values ** 2
    return float(np.sqrt(np.dot(grid.trapezoid_weights, squares.sum(axis=0))))


def _is_zero(values: np.ndarray) -> bool:
    return not np.any(values)


def apriori_check(y: Field, y0: ModalCoefficients, f: Optional[Field], constants: AprioriConstants) -> AprioriReport:
    """
    Measure the norms the theorem bounds and compare each with its bound.

    The H2 corollaries are reported only when they apply: the f = 0 bound when
    the forcing vanishes and the y0 = 0 bound when the initial datum vanishes.
    """
    y0.check_same_basis(y.basis)
    grid = y.grid
    lam = y.basis.eigenvalues
    forcing = np.zeros_like(y.values) if f is None else f.values
    f_norm = space_time_norm(forcing, grid)
    y0_norms = norms(y0)

    checks = [
        BoundCheck(
            name="l2_h10",
            measured=space_time_norm(y.values, grid, lam),
            bound=constants.lambda_big_1 * (y0_norms.h10 + f_norm),
        ),
        BoundCheck(
            name="sup_l2",
            measured=float(np.max(np.sqrt(np.sum(y.values ** 2, axis=0)))),
            bound=constants.lambda_big_2 * (y0_norms.l2 + f_norm),
        ),
        BoundCheck(
            name="l2_l2",
            measured=space_time_norm(y.values, grid),
            bound=constants.lambda_big_2 * (y0_norms.l2 + f_norm),
        ),
    ]
    h2 = space_time_norm(y.values, grid, lam ** 2)
    if _is_zero(forcing):
        checks.append(BoundCheck(name="l2_h2_free", measured=h2, bound=constants.lambda_big_3 * y0_norms.l2))
    if _is_zero(y0.coeffs):
        checks.append(BoundCheck(name="l2_h2_forced", measured=h2,
                                 bound=constants.t_final * constants.lambda_big_4 * f_norm))

    for check in checks:
        if not check.passed:
            logger.warning(f"a priori bound {check.name} violated: {check.measured:.6g} > {check.bound:.6g}")
    return AprioriReport(checks=checks)


def adjoint_apriori_check(eta: Field, source: Field, constants: AprioriConstants) -> BoundCheck:
    """||eta||_{L2(H1_0)} <= sqrt(C2) ||source||_{L2(Q)} for the adjoint state"""
    eta.check_compatible(source)
    return BoundCheck(
        name="adjoint_l2_h10",
        measured=space_time_norm(eta.values, eta.grid, eta.basis.eigenvalues),
        bound=math.sqrt(constants.c2) * space_time_norm(source.values, source.grid),
    )
