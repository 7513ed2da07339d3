import dataclasses

import numpy as np
import pytest
from scipy.integrate import quad

from adjoint_control import (
    ControlProblem,
    PreconditionError,
    adjoint_residual,
    adjointness_defect,
    control_to_state,
    cost,
    duality_check,
    inner,
    norm,
    optimize,
    reduced_gradient,
    solve_adjoint,
    state,
    verify_optimality,
)
from forward_solver import Field, modal_constants, solve_forward
from frac_ops import AlphaContext, GridError, TimeGrid, TimeSeries
from mittag_leffler import mlf
from spectral import SpectralBasis


def make_problem(n_time=128, n_modes=4, n_reg=1.0, z_d=None, y0_mode=1, seed=3):
    basis = SpectralBasis(length_l=1.0, n_modes=n_modes, quad_points=512)
    grid = TimeGrid(1.0, n_time)
    if z_d is None:
        rng = np.random.default_rng(seed)
        z_d = Field(basis, grid, 0.1 * rng.standard_normal((n_modes, n_time + 1)))
    y0 = basis.unit(y0_mode) if y0_mode else basis.zeros()
    return ControlProblem(basis=basis, grid=grid, ctx=AlphaContext(0.5), y0=y0, z_d=z_d, n_reg=n_reg)


def random_field(problem, rng):
    return problem.zeros().with_values(rng.standard_normal(problem.z_d.values.shape))


@pytest.fixture(scope="module")
def tracking_problem():
    return make_problem()


@pytest.fixture(scope="module")
def tracking_result(tracking_problem):
    return optimize(tracking_problem, tol=1e-10, max_iter=100)


def test_inner_product_is_trapezoid_in_time():
    basis, grid = SpectralBasis(n_modes=2), TimeGrid(2.0, 8)
    ones = Field(basis, grid, np.ones((2, 9)))
    assert inner(ones, ones) == pytest.approx(4.0)
    assert norm(ones) == pytest.approx(2.0)


def test_problem_validation():
    with pytest.raises(PreconditionError):
        make_problem(n_reg=0.0)
    with pytest.raises(PreconditionError):
        make_problem(n_reg=-1.0)
    basis = SpectralBasis(n_modes=4, quad_points=512)
    with pytest.raises(GridError):
        ControlProblem(basis=basis, grid=TimeGrid(1.0, 10), ctx=AlphaContext(0.5), y0=basis.zeros(),
                       z_d=Field.zeros(basis, TimeGrid(1.0, 20)), n_reg=1.0)


def test_cost_of_zero_problem_vanishes():
    problem = make_problem(z_d=Field.zeros(SpectralBasis(n_modes=4, quad_points=512), TimeGrid(1.0, 128)), y0_mode=0)
    assert cost(problem.zeros(), problem) == 0.0


def test_cost_of_free_decay_matches_quadrature():
    basis = SpectralBasis(n_modes=4, quad_points=512)
    problem = make_problem(n_time=512, z_d=Field.zeros(basis, TimeGrid(1.0, 512)))
    ctx = problem.ctx
    mc = modal_constants(np.pi ** 2, ctx)
    exact, _ = quad(lambda t: (mc.zeta_i * mlf(ctx.alpha, 1.0, -mc.gamma_i * t ** ctx.alpha)) ** 2, 0.0, 1.0)
    assert cost(problem.zeros(), problem) == pytest.approx(0.5 * exact, rel=1e-3)


def test_cost_is_homogeneous_without_data(rng):
    basis = SpectralBasis(n_modes=4, quad_points=512)
    problem = make_problem(y0_mode=0, z_d=Field.zeros(basis, TimeGrid(1.0, 128)))
    v = random_field(problem, rng)
    assert cost(v * 2.0, problem) == pytest.approx(4.0 * cost(v, problem), rel=1e-12)


def test_cost_scales_with_regularisation(rng):
    low, high = make_problem(n_reg=1.0), make_problem(n_reg=3.0)
    v = random_field(low, rng)
    assert cost(v, high) - cost(v, low) == pytest.approx(inner(v, v), rel=1e-10)


def test_adjoint_of_zero_source_vanishes(tracking_problem):
    assert not np.any(solve_adjoint(tracking_problem.zeros(), tracking_problem).values)


def test_reversed_adjoint_is_forward_solve_backwards(tracking_problem, rng):
    source = random_field(tracking_problem, rng)
    eta = solve_adjoint(source, tracking_problem, symmetrize=False)
    expected = solve_forward(tracking_problem.basis.zeros(), source.reversed(), tracking_problem.ctx,
                             tracking_problem.grid).reversed()
    np.testing.assert_allclose(eta.values, expected.values, atol=1e-14)


def test_symmetrised_adjoint_is_exact(tracking_problem, rng):
    v, g = random_field(tracking_problem, rng), random_field(tracking_problem, rng)
    assert adjointness_defect(v, g, tracking_problem) <= 1e-10


def test_reversed_adjoint_is_close(rng):
    problem = make_problem(n_time=400)
    v, g = random_field(problem, rng), random_field(problem, rng)
    assert adjointness_defect(v, g, problem, symmetrize=False) <= 1e-3


def test_gradient_vanishes_on_reachable_target():
    free = make_problem()
    target = state(free.zeros(), free)
    problem = dataclasses.replace(free, z_d=target)
    assert norm(reduced_gradient(problem.zeros(), problem)) <= 1e-14


def test_gradient_matches_central_differences(tracking_problem, rng):
    v, delta = random_field(tracking_problem, rng), random_field(tracking_problem, rng)
    h = 1e-5
    fd = (cost(v + delta * h, tracking_problem) - cost(v - delta * h, tracking_problem)) / (2.0 * h)
    exact = inner(reduced_gradient(v, tracking_problem), delta)
    assert fd == pytest.approx(exact, rel=1e-6)


def test_cost_is_quadratic(tracking_problem, rng):
    p = tracking_problem
    v = random_field(p, rng)
    g0 = reduced_gradient(p.zeros(), p)
    sv = control_to_state(v, p)
    expected = cost(p.zeros(), p) + inner(g0, v) + 0.5 * (inner(sv, sv) + p.n_reg * inner(v, v))
    assert cost(v, p) == pytest.approx(expected, rel=1e-10)


def test_optimize_zero_problem():
    basis = SpectralBasis(n_modes=4, quad_points=512)
    problem = make_problem(y0_mode=0, z_d=Field.zeros(basis, TimeGrid(1.0, 128)))
    result = optimize(problem)
    assert result.converged
    assert result.iterations == 0
    assert result.j_value == 0.0
    assert not np.any(result.u_hat.values)


def test_optimize_tracking_problem(tracking_problem, tracking_result):
    result = tracking_result
    assert result.converged
    assert result.method == "cr"
    assert 0 < result.iterations <= 20
    assert np.all(np.diff(result.grad_norm_history) < 0)
    assert np.all(np.diff(result.j_history) <= 1e-14)
    stationarity = norm(result.u_hat + result.eta * (1.0 / tracking_problem.n_reg))
    assert stationarity <= 1e-6
    assert result.j_value == pytest.approx(cost(result.u_hat, tracking_problem), rel=1e-12)


def test_conjugate_gradient_agrees(tracking_problem, tracking_result):
    cg = optimize(tracking_problem, tol=1e-10, max_iter=100, method="cg")
    assert cg.converged
    assert cg.method == "cg"
    np.testing.assert_allclose(cg.u_hat.values, tracking_result.u_hat.values, atol=1e-8)


def test_optimize_rejects_bad_arguments(tracking_problem):
    with pytest.raises(PreconditionError):
        optimize(tracking_problem, tol=0.0)
    with pytest.raises(PreconditionError):
        optimize(tracking_problem, method="newton")


def test_iteration_cap_reports_non_convergence(tracking_problem):
    result = optimize(tracking_problem, tol=1e-14, max_iter=1)
    assert not result.converged
    assert result.iterations == 1
    assert len(result.grad_norm_history) == 2


@pytest.fixture(scope="module")
def mode_one_problem():
    basis = SpectralBasis(length_l=1.0, n_modes=16, quad_points=512)
    return make_problem(n_time=512, n_modes=16, z_d=Field.zeros(basis, TimeGrid(1.0, 512)))


@pytest.fixture(scope="module")
def mode_one_result(mode_one_problem):
    return optimize(mode_one_problem, tol=1e-10, max_iter=100)


def test_mode_one_fixture_is_stationary(mode_one_problem, mode_one_result):
    assert mode_one_result.converged
    u_hat, eta = mode_one_result.u_hat, mode_one_result.eta
    assert norm(u_hat + eta * (1.0 / mode_one_problem.n_reg)) / max(1.0, norm(u_hat)) <= 1e-6


def test_verify_optimality(mode_one_problem, mode_one_result):
    report = verify_optimality(mode_one_result, mode_one_problem)
    assert report.passed
    assert report.residual_tol == 1e-3
    assert report.perturbation_wins == report.perturbation_trials == 10
    assert report.terminal_defect <= 1e-12
    assert report.stationarity <= 1e-6


@pytest.mark.parametrize("name", ["u_hat", "y_hat"])
def test_verify_optimality_rejects_corrupted_triples(mode_one_problem, mode_one_result, name):
    corrupted = dataclasses.replace(mode_one_result, **{name: getattr(mode_one_result, name) * 1.5})
    assert not verify_optimality(corrupted, mode_one_problem, n_perturb=2).passed


def test_adjoint_residual_is_small(tracking_problem, tracking_result):
    source = tracking_result.y_hat - tracking_problem.z_d
    assert adjoint_residual(tracking_result.eta, source, tracking_problem) <= 1e-1


def test_regularisation_sweep():
    results = [optimize(make_problem(n_reg=n_reg), tol=1e-10) for n_reg in (0.1, 1.0, 10.0)]
    sizes = [norm(r.u_hat) for r in results]
    assert sizes[0] > sizes[1] > sizes[2] > 0.0
    # J(u_hat) does not increase as n_reg decreases
    assert results[0].j_value <= results[1].j_value <= results[2].j_value


def test_single_mode_tracking_needs_few_iterations():
    basis = SpectralBasis(n_modes=4, quad_points=512)
    problem = make_problem(z_d=Field.zeros(basis, TimeGrid(1.0, 128)))
    result = optimize(problem, tol=1e-10)
    assert result.converged
    assert result.iterations <= 1 + 5
    assert not np.any(result.u_hat.values[1:])


@pytest.mark.parametrize("tol", [1e-4, 1e-6, 1e-8])
def test_stationarity_follows_tolerance(tracking_problem, tol):
    result = optimize(tracking_problem, tol=tol)
    report = verify_optimality(result, tracking_problem, n_perturb=2)
    assert report.stationarity <= report.stationarity_tol


def _pair(grid, basis, y_fn):
    t = grid.nodes
    y = Field.separable(basis.unit(1), TimeSeries(grid, y_fn(t)))
    phi = Field.separable(basis.unit(1), TimeSeries(grid, grid.t_final - t))
    return y, phi


@pytest.mark.parametrize("y_fn", [lambda t: t, lambda t: 1.0 + t], ids=["zero_start", "nonzero_start"])
def test_duality_identity(ctx_half, y_fn):
    basis, grid = SpectralBasis(n_modes=2, quad_points=256), TimeGrid(1.0, 1000)
    y, phi = _pair(grid, basis, y_fn)
    assert duality_check(y, phi, ctx_half) <= 1e-3


def test_duality_requires_vanishing_terminal_value(ctx_half):
    basis, grid = SpectralBasis(n_modes=2, quad_points=256), TimeGrid(1.0, 50)
    y = Field.separable(basis.unit(1), TimeSeries(grid, grid.nodes))
    with pytest.raises(PreconditionError):
        duality_check(y, y, ctx_half)


def test_duality_with_zero_test_function(ctx_half):
    basis, grid = SpectralBasis(n_modes=2, quad_points=256), TimeGrid(1.0, 50)
    y, _ = _pair(grid, basis, lambda t: 1.0 + t ** 2)
    assert duality_check(y, Field.zeros(basis, grid), ctx_half) == 0.0


def test_duality_is_exact_for_zero_initial_value(ctx_half):
    basis = SpectralBasis(n_modes=2, quad_points=256)
    for n in (100, 200, 400):
        assert duality_check(*_pair(TimeGrid(1.0, n), basis, lambda t: t ** 2), ctx_half) <= 1e-12


def test_duality_defect_shrinks_under_refinement(ctx_half):
    basis = SpectralBasis(n_modes=2, quad_points=256)
    defects = [duality_check(*_pair(TimeGrid(1.0, n), basis, lambda t: 1.0 + t ** 2), ctx_half) for n in (100, 200, 400)]
    assert defects[0] > 1e-12
    assert defects[2] < 0.5 * defects[0]
