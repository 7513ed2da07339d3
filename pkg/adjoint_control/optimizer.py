"""
Reduced-Gradient Optimal Control
Cost, adjoint state, gradient, Krylov optimizer and the optimality-system checks
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from forward_solver import Field, NumericalError, map_modes, modal_propagator, modal_residuals, solve_forward
from frac_ops import AlphaContext, abc_derivative_left, abc_derivative_right
from mittag_leffler import mlf

from .errors import PreconditionError
from .problem import ControlProblem, OptimalityResult, inner, norm

logger = logging.getLogger(__name__)

METHODS = ("cr", "cg")


def state(v: Field, problem: ControlProblem) -> Field:
    """y(v): the state with initial datum y0 and forcing v + background_f"""
    return solve_forward(problem.y0, problem.forcing(v), problem.ctx, problem.grid, problem.threads)


def control_to_state(v: Field, problem: ControlProblem) -> Field:
    """Linear part S v: zero initial datum, forcing v only"""
    return solve_forward(problem.basis.zeros(), v, problem.ctx, problem.grid, problem.threads)


def _cost_from_state(y: Field, v: Field, problem: ControlProblem) -> float:
    j_value = 0.5 * inner(y - problem.z_d, y - problem.z_d) + 0.5 * problem.n_reg * inner(v, v)
    if not math.isfinite(j_value):
        raise NumericalError(f"cost is not finite: {j_value}")
    return j_value


def cost(v: Field, problem: ControlProblem) -> float:
    """J(v) = 1/2 ||y(v) - z_d||^2 + n_reg/2 ||v||^2 in L2(Q)"""
    return _cost_from_state(state(v, problem), v, problem)


def solve_adjoint(source: Field, problem: ControlProblem, symmetrize: bool = True) -> Field:
    """
    Adjoint state for -D_T^alpha eta - eta'' = source.

    Args:
        source: Right-hand side, usually y_hat - z_d
        problem: Problem supplying basis, grid and order
        symmetrize: True returns the exact adjoint of the discrete control-to-state
            map in the trapezoid inner product; False runs the forward solver on the
            time-reversed source with zero initial data and reverses the result back

    Returns:
        eta on the problem grid
    """
    source.check_compatible(problem.zeros())
    ctx, grid = problem.ctx, problem.grid
    lambdas = problem.basis.eigenvalues
    weights = grid.trapezoid_weights

    def adjoint_one(i: int) -> np.ndarray:
        propagator = modal_propagator(float(lambdas[i]), ctx, grid)
        if symmetrize:
            return propagator.apply_source_transpose(weights * source.values[i]) / weights
        return propagator.apply(0.0, source.values[i][::-1])[::-1]

    values = np.stack(map_modes(adjoint_one, problem.basis.n_modes, problem.threads))
    if not np.all(np.isfinite(values)):
        raise NumericalError("adjoint solve produced non-finite values")
    return Field(problem.basis, grid, values)


def reduced_gradient(v: Field, problem: ControlProblem, symmetrize: bool = True) -> Field:
    """n_reg v + eta with eta the adjoint state of y(v) - z_d"""
    eta = solve_adjoint(state(v, problem) - problem.z_d, problem, symmetrize)
    return v * problem.n_reg + eta


def adjointness_defect(v: Field, g: Field, problem: ControlProblem, symmetrize: bool = True) -> float:
    """|<S v, g> - <v, S* g>| / (||v|| ||g||)"""
    lhs = inner(control_to_state(v, problem), g)
    rhs = inner(v, solve_adjoint(g, problem, symmetrize))
    scale = norm(v) * norm(g)
    return abs(lhs - rhs) / scale if scale > 0 else 0.0


def _hessian(p: Field, problem: ControlProblem):
    # returns (H p, S p) with H = S*S + n_reg I
    sp = control_to_state(p, problem)
    return solve_adjoint(sp, problem) + p * problem.n_reg, sp


def optimize(problem: ControlProblem, tol: float = 1e-8, max_iter: int = 200, method: str = "cr") -> OptimalityResult:
    """
    Minimise the reduced cost with a Krylov method on H v = -S*(y(0) - z_d).

    Conjugate residual ("cr") keeps the gradient norm monotone; plain conjugate
    gradient ("cg") is available for comparison. Both use the L2(Q) inner
    product in which solve_adjoint is the exact adjoint, and both cost one
    forward and one adjoint solve per iteration.

    Args:
        problem: Tracking problem
        tol: Stop once ||grad|| <= tol * (1 + ||grad at v = 0||)
        max_iter: Iteration cap; exceeding it returns a result with converged=False
        method: "cr" or "cg"

    Returns:
        OptimalityResult with u_hat, y_hat, eta and the per-iteration history
    """
    if not tol > 0:
        raise PreconditionError(f"tol must be positive, got {tol}")
    if method not in METHODS:
        raise PreconditionError(f"unknown method {method!r}, expected one of {METHODS}")

    v = problem.zeros()
    y_free = state(v, problem)
    offset = y_free - problem.z_d
    r = -solve_adjoint(offset, problem)
    sv = problem.zeros()

    grad_norm = norm(r)
    threshold = tol * (1.0 + grad_norm)
    j_value = _cost_from_state(y_free, v, problem)
    grad_history = [grad_norm]
    j_history = [j_value]
    logger.info(f"optimize ({method}): J0={j_value:.6g}, |grad0|={grad_norm:.6g}, threshold={threshold:.3g}")

    p, sp = r, None
    hr = ap = None
    rho = 0.0
    if method == "cr" and grad_norm > threshold:
        hr, sr = _hessian(r, problem)
        ap, sp = hr, sr
        rho = inner(r, hr)

    iterations = 0
    while grad_norm > threshold and iterations < max_iter:
        if method == "cg":
            hp, sp = _hessian(p, problem)
            rr = inner(r, r)
            step = rr / inner(p, hp)
            v = v + p * step
            sv = sv + sp * step
            r = r - hp * step
            beta = inner(r, r) / rr
            p = r + p * beta
        else:
            step = rho / inner(ap, ap)
            v = v + p * step
            sv = sv + sp * step
            r = r - ap * step
            hr, sr = _hessian(r, problem)
            rho_next = inner(r, hr)
            beta = rho_next / rho
            rho = rho_next
            p = r + p * beta
            sp = sr + sp * beta
            ap = hr + ap * beta
        iterations += 1
        grad_norm = norm(r)
        j_value = _cost_from_state(sv + y_free, v, problem)
        grad_history.append(grad_norm)
        j_history.append(j_value)
        logger.debug(f"iteration {iterations}: |grad|={grad_norm:.6g}, J={j_value:.12g}")

    converged = grad_norm <= threshold
    if converged:
        logger.info(f"optimize converged in {iterations} iterations, J={j_value:.12g}")
    else:
        logger.warning(f"optimize stopped after {iterations} iterations, |grad|={grad_norm:.3g} > {threshold:.3g}")

    y_hat = state(v, problem)
    eta = solve_adjoint(y_hat - problem.z_d, problem)
    return OptimalityResult(
        u_hat=v,
        y_hat=y_hat,
        eta=eta,
        j_value=_cost_from_state(y_hat, v, problem),
        grad_norm_history=grad_history,
        j_history=j_history,
        iterations=iterations,
        converged=converged,
        tolerance=threshold,
        method=method,
    )


@dataclass(frozen=True)
class OptimalityReport:
    """Residuals of the optimality system for one result

    Attributes:
        terminal_defect: Largest |eta_i(T) - c_i (y_hat - z_d)_i(T)|, where c_i is the
            terminal value the adjoint representation predicts. It is not |eta(T)|:
            the discrete adjoint starts from a nonzero value at T.
    """

    forward_residual: float
    adjoint_residual: float
    stationarity: float
    terminal_defect: float
    perturbation_wins: int
    perturbation_trials: int
    stationarity_tol: float
    residual_tol: float

    @property
    def passed(self) -> bool:
        return (
            self.forward_residual <= self.residual_tol
            and self.adjoint_residual <= self.residual_tol
            and self.stationarity <= self.stationarity_tol
            and self.terminal_defect <= 1e-12
            and self.perturbation_wins == self.perturbation_trials
        )


def _terminal_defect(eta: Field, source: Field, problem: ControlProblem, symmetrized: bool) -> float:
    # the representation gives eta(T) = (source_weight [+ k c0]) * source(T) rather than 0
    worst = 0.0
    for i, lam in enumerate(problem.basis.eigenvalues):
        propagator = modal_propagator(float(lam), problem.ctx, problem.grid)
        factor = propagator.constants.source_weight
        if symmetrized:
            factor += propagator.constants.k_i * float(propagator.weights.c[0])
        worst = max(worst, abs(eta.values[i, -1] - factor * source.values[i, -1]))
    return worst


def adjoint_residual(eta: Field, source: Field, problem: ControlProblem) -> float:
    """Residual of -D_T eta + lambda eta = source, measured on the time-reversed problem"""
    reversed_eta = Field(problem.basis, problem.grid, eta.values[:, ::-1], initial=problem.basis.zeros())
    return float(np.max(modal_residuals(reversed_eta, source.reversed(), problem.ctx)))


def verify_optimality(result: OptimalityResult, problem: ControlProblem, n_perturb: int = 10,
                      perturb_size: float = 1e-2, seed: int = 0, residual_tol: float = 1e-3) -> OptimalityReport:
    """
    Check the computed triple against the optimality system.

    Covers the state residual, the adjoint residual, the algebraic condition
    u_hat = -eta / n_reg, the terminal value of eta, and J(u_hat) <= J(u_hat + delta)
    for n_perturb random delta of relative size perturb_size.
    """
    forward = float(np.max(modal_residuals(result.y_hat, problem.forcing(result.u_hat), problem.ctx)))
    source = result.y_hat - problem.z_d
    backward = adjoint_residual(result.eta, source, problem)
    stationarity = norm(result.u_hat + result.eta * (1.0 / problem.n_reg)) / max(1.0, norm(result.u_hat))
    terminal = _terminal_defect(result.eta, source, problem, result.symmetrized_adjoint)

    rng = np.random.default_rng(seed)
    radius = perturb_size * max(1.0, norm(result.u_hat))
    j_opt = result.j_value
    wins = 0
    for _ in range(n_perturb):
        delta = problem.zeros().with_values(rng.standard_normal(result.u_hat.values.shape))
        delta = delta * (radius / norm(delta))
        if cost(result.u_hat + delta, problem) >= j_opt - 1e-12 * (1.0 + abs(j_opt)):
            wins += 1

    report = OptimalityReport(
        forward_residual=forward,
        adjoint_residual=backward,
        stationarity=stationarity,
        terminal_defect=terminal,
        perturbation_wins=wins,
        perturbation_trials=n_perturb,
        stationarity_tol=10.0 * result.tolerance / problem.n_reg,
        residual_tol=residual_tol,
    )
    logger.info(f"optimality check: forward={forward:.3g}, adjoint={backward:.3g}, "
                f"stationarity={stationarity:.3g}, perturbations {wins}/{n_perturb}")
    return report


def duality_check(y: Field, phi: Field, ctx: AlphaContext) -> float:
    """
    Relative defect of the integration-by-parts identity for phi(T) = 0:

    <D_0 y - y'', phi> = <y, -D_T phi - phi''> - B/(1-alpha) sum_i y_i(0) int_0^T E_alpha(-gamma t^alpha) phi_i dt

    Both sides use the discrete operators and the trapezoid rule in time.
    """
    y.check_compatible(phi)
    scale = max(1.0, float(np.max(np.abs(phi.values))))
    if np.any(np.abs(phi.values[:, -1]) > 1e-14 * scale):
        raise PreconditionError("phi must vanish at the final time")

    grid = y.grid
    lam = y.basis.eigenvalues[:, None]
    left = np.stack([abc_derivative_left(s, ctx).values for s in y.modal_series])
    right = np.stack([abc_derivative_right(s, ctx).values for s in phi.modal_series])
    kernel = np.asarray(mlf(ctx.alpha, 1.0, -ctx.gamma_rate * grid.nodes ** ctx.alpha))
    w = grid.trapezoid_weights

    lhs = float(np.dot(w, np.sum((left + lam * y.values) * phi.values, axis=0)))
    initial_term = ctx.scale * float(np.dot(w, kernel * (y.values[:, 0] @ phi.values)))
    rhs = float(np.dot(w, np.sum(y.values * (-right + lam * phi.values), axis=0))) - initial_term
    return abs(lhs - rhs) / (1.0 + abs(lhs))
