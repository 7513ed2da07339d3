"""
Verification and Convergence Suites
Property checks of every layer, printed one line per check
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import mpmath
import numpy as np
from scipy.special import rgamma

from adjoint_control import ControlProblem, adjointness_defect, cost, duality_check, inner, reduced_gradient
from forward_solver import Field, residual, solve_forward
from frac_ops import (
    AlphaContext,
    TimeGrid,
    TimeSeries,
    ab_integral,
    abc_derivative_left,
    abc_derivative_right,
    abr_derivative_left,
    product_weights,
)
from mittag_leffler import default_accuracy, mlf, mlf_generalized
from spectral import SpectralBasis

from .scenario import ScenarioConfig
from .writers import write_convergence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteCheck:
    name: str
    measured: float
    bound: float
    at_least: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        return self.measured >= self.bound if self.at_least else self.measured <= self.bound

    def line(self) -> str:
        status = "ok" if self.passed else "FAIL"
        return f"{status} {self.name} {self.measured:.6e} {self.bound:.6e}"


def observed_order(errors: List[float], factor: float = 2.0) -> float:
    """Order from the last two errors of a sequence refined by `factor`"""
    coarse, fine = errors[-2], errors[-1]
    if coarse <= 0 or fine <= 0:
        return math.inf
    return math.log(coarse / fine) / math.log(factor)


# ── mlf ────────────────────────────────────────────────────────

def mlf_suite() -> List[SuiteCheck]:
    tol = default_accuracy().abs_tol
    checks = [SuiteCheck("mlf_exp", abs(mlf(1.0, 1.0, 1.0) - math.e), 1e-12)]

    xs = np.linspace(0.0, 5.0, 26)
    with mpmath.workdps(40):
        oracle = np.array([float(mpmath.exp(x * x) * mpmath.erfc(x)) for x in xs])
    checks.append(SuiteCheck("mlf_erfc", float(np.max(np.abs(mlf(0.5, 1.0, -xs) - oracle))), 1e-10))

    worst = 0.0
    for alpha in (0.3, 0.5, 0.7, 0.9):
        for beta in (0.5, 1.0, 2.0):
            z = -np.array([0.1, 1.0, 5.0, 14.0, 20.0, 60.0, 100.0])
            defect = np.abs(mlf(alpha, beta, z) - rgamma(beta) - z * mlf(alpha, alpha + beta, z))
            worst = max(worst, float(np.max(defect / (1.0 - z))))
    checks.append(SuiteCheck("mlf_recurrence", worst, 10.0 * tol))

    worst = 0.0
    for rho in (1.0, 2.0):
        for z in (-0.5, -1.0, -2.0):
            alpha, beta = 0.5, 1.5
            value = (alpha * rho * mlf_generalized(rho + 1.0, alpha, beta, z)
                     - (1.0 + alpha * rho - beta) * mlf_generalized(rho, alpha, beta, z)
                     - mlf_generalized(rho, alpha, beta - 1.0, z))
            worst = max(worst, abs(value))
    checks.append(SuiteCheck("mlf_three_term", worst, 10.0 * tol))

    probes = np.linspace(0.0, 1000.0, 401)
    steepest = -math.inf
    for alpha in (0.3, 0.5, 0.9):
        values = mlf(alpha, 1.0, -probes)
        if values[-1] <= 0 or values[0] > 1.0:
            steepest = math.inf
        steepest = max(steepest, float(np.max(np.diff(values))))
    checks.append(SuiteCheck("mlf_monotone_decay", steepest, 0.0))

    alpha, rate, n = 0.5, 2.0, 400
    grid = TimeGrid(2.0, n)
    integral = rate * product_weights(alpha, rate, grid.dt, n).apply(np.ones(n + 1))
    closed = 1.0 - mlf(alpha, 1.0, -rate * grid.nodes ** alpha)
    rel = float(np.max(np.abs(integral[1:] - closed[1:]) / np.abs(closed[1:])))
    checks.append(SuiteCheck("mlf_kernel_integral", rel, 1e-8))
    return checks


# ── fracops ────────────────────────────────────────────────────

def _inversion_errors(alpha: float, steps: List[int]) -> List[float]:
    ctx = AlphaContext(alpha)
    errors = []
    for n in steps:
        u = TimeSeries.from_function(TimeGrid(1.0, n), lambda t: t ** 2)
        back = ab_integral(abc_derivative_left(u, ctx), ctx)
        errors.append(float(np.max(np.abs(back.values - (u.values - u.values[0])))))
    return errors


def fracops_suite() -> List[SuiteCheck]:
    ctx = AlphaContext(0.5)
    grid = TimeGrid(1.0, 200)
    rng = np.random.default_rng(7)

    constant = TimeSeries(grid, np.full(grid.n_steps + 1, 3.0))
    checks = [SuiteCheck("fracops_constant", float(np.max(np.abs(abc_derivative_left(constant, ctx).values))), 0.0)]

    linear = TimeSeries(grid, grid.nodes)
    exact = ctx.scale * grid.nodes * mlf(ctx.alpha, 2.0, -ctx.gamma_rate * grid.nodes ** ctx.alpha)
    checks.append(SuiteCheck("fracops_linear", float(np.max(np.abs(abc_derivative_left(linear, ctx).values - exact))), 1e-12))

    worst = 0.0
    for _ in range(20):
        u = TimeSeries(grid, rng.standard_normal(grid.n_steps + 1))
        total = abc_derivative_right(u, ctx).values + abc_derivative_left(u.reversed(), ctx).values[::-1]
        worst = max(worst, float(np.max(np.abs(total))))
    checks.append(SuiteCheck("fracops_reversal", worst, 1e-12))

    u = TimeSeries(grid, rng.standard_normal(grid.n_steps + 1))
    kernel = ctx.scale * u.values[0] * mlf(ctx.alpha, 1.0, -ctx.gamma_rate * grid.nodes ** ctx.alpha)
    relation = abr_derivative_left(u, ctx).values - abc_derivative_left(u, ctx).values - kernel
    checks.append(SuiteCheck("fracops_abr_relation", float(np.max(np.abs(relation))), 1e-12))

    w = TimeSeries(grid, rng.standard_normal(grid.n_steps + 1))
    worst = 0.0
    for op in (abc_derivative_left, abc_derivative_right, abr_derivative_left, ab_integral):
        combined = op(u * 2.0 + w * -0.5, ctx).values
        separate = 2.0 * op(u, ctx).values - 0.5 * op(w, ctx).values
        worst = max(worst, float(np.max(np.abs(combined - separate))))
    checks.append(SuiteCheck("fracops_linearity", worst, 1e-10))

    checks.append(SuiteCheck("fracops_inversion_order", observed_order(_inversion_errors(0.7, [100, 200, 400])), 1.5,
                             at_least=True))
    return checks


# ── duality / adjoint / gradient ───────────────────────────────

def _fixture_problem(n_time: int, n_modes: int = 4, seed: int = 3) -> ControlProblem:
    basis = SpectralBasis(length_l=1.0, n_modes=n_modes, quad_points=512)
    grid = TimeGrid(1.0, n_time)
    rng = np.random.default_rng(seed)
    z_d = Field(basis, grid, rng.standard_normal((n_modes, n_time + 1)) * 0.1)
    return ControlProblem(basis=basis, grid=grid, ctx=AlphaContext(0.5), y0=basis.unit(1), z_d=z_d, n_reg=1.0)


def _power_pair(basis: SpectralBasis, grid: TimeGrid, power: int, offset: float = 0.0):
    # y = (offset + t^power) w_1 against phi = (T - t) w_1
    t = grid.nodes
    profile = basis.unit(1)
    y = Field.separable(profile, TimeSeries(grid, offset + t ** power))
    phi = Field.separable(profile, TimeSeries(grid, grid.t_final - t))
    return y, phi


def duality_suite() -> List[SuiteCheck]:
    ctx = AlphaContext(0.5)
    basis = SpectralBasis(length_l=1.0, n_modes=2, quad_points=256)
    y, phi = _power_pair(basis, TimeGrid(1.0, 1000), 1)
    checks = [SuiteCheck("duality_linear", duality_check(y, phi, ctx), 1e-3)]

    errors = []
    for n in (100, 200, 400):
        # y(0) = 1 leaves a quadrature defect in the initial-value term
        y, phi = _power_pair(basis, TimeGrid(1.0, n), 2, offset=1.0)
        errors.append(duality_check(y, phi, ctx))
    decreasing = all(b < a for a, b in zip(errors, errors[1:]))
    checks.append(SuiteCheck("duality_refinement", errors[-1] if decreasing else math.inf, errors[0]))
    return checks


def _random_field(problem: ControlProblem, rng: np.random.Generator) -> Field:
    return problem.zeros().with_values(rng.standard_normal(problem.z_d.values.shape))


def adjoint_suite() -> List[SuiteCheck]:
    rng = np.random.default_rng(11)
    problem = _fixture_problem(200)
    v, g = _random_field(problem, rng), _random_field(problem, rng)
    checks = [SuiteCheck("adjoint_exact", adjointness_defect(v, g, problem), 1e-10)]

    fine = _fixture_problem(1000)
    v, g = _random_field(fine, rng), _random_field(fine, rng)
    checks.append(SuiteCheck("adjoint_reversed", adjointness_defect(v, g, fine, symmetrize=False), 1e-3))
    return checks


def gradient_suite() -> List[SuiteCheck]:
    rng = np.random.default_rng(5)
    problem = _fixture_problem(100)
    v, delta = _random_field(problem, rng), _random_field(problem, rng)
    h = 1e-5
    fd = (cost(v + delta * h, problem) - cost(v - delta * h, problem)) / (2.0 * h)
    exact = inner(reduced_gradient(v, problem), delta)
    return [SuiteCheck("gradient_fd", abs(fd - exact) / max(abs(exact), 1e-30), 1e-4)]


SUITES: Dict[str, Callable[[], List[SuiteCheck]]] = {
    "mlf": mlf_suite,
    "fracops": fracops_suite,
    "duality": duality_suite,
    "adjoint": adjoint_suite,
    "gradient": gradient_suite,
}


def run_suite(name: str, echo: Optional[Callable[[str], None]] = print) -> List[SuiteCheck]:
    """Run one suite, or every suite for name == "all", printing a line per check"""
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for suite in names:
        logger.info(f"running verification suite {suite}")
        for check in SUITES[suite]():
            checks.append(check)
            if echo is not None:
                echo(check.line())
    return checks


# ── convergence ────────────────────────────────────────────────

def run_convergence(config: ScenarioConfig, refinements: int, out_dir) -> List[tuple]:
    """
    Forward residual and duality residual on `refinements` successive halvings of dt.

    The duality test function is (T - t) times the initial profile, or times w_1
    when the initial datum vanishes.
    """
    ctx, basis, y0 = config.ctx(), config.basis(), config.y0()
    profile = y0 if np.any(y0.coeffs) else basis.unit(1)
    rows = []
    forward_errors = []
    for level in range(refinements + 1):
        grid = config.grid(config.n_time * 2 ** level)
        f = config.forcing(grid)
        y = solve_forward(y0, f, ctx, grid)
        forward = residual(y, f, ctx)
        phi = Field.separable(profile, TimeSeries(grid, grid.t_final - grid.nodes))
        dual = duality_check(y, phi, ctx)
        forward_errors.append(forward)
        order = observed_order(forward_errors) if level > 0 else ""
        rows.append((grid.dt, forward, dual, order))
        logger.info(f"convergence level {level}: dt={grid.dt:.3e}, residual={forward:.3e}, duality={dual:.3e}")
    write_convergence(f"{out_dir}/convergence.csv", rows)
    return rows
