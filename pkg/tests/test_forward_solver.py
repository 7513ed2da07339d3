import numpy as np
import pytest

from forward_solver import (
    Field,
    initial_jump,
    map_modes,
    modal_constants,
    modal_residuals,
    residual,
    solve_forward,
    solve_modal,
)
from frac_ops import AlphaContext, GridError, OrderDomainError, TimeGrid, TimeSeries, ab_integral
from spectral import BasisMismatchError, SpectralBasis, project, reconstruct

PI2 = np.pi ** 2


def test_modal_constants_at_half_order(ctx_half):
    mc = modal_constants(PI2, ctx_half)
    assert mc.gamma_i == pytest.approx(0.86320, abs=1e-5)
    assert mc.zeta_i == pytest.approx(0.136804, abs=1e-6)
    assert mc.k_i == pytest.approx(0.011965, abs=1e-6)
    # lambda k / gamma = zeta
    assert PI2 * mc.k_i / mc.gamma_i == pytest.approx(mc.zeta_i, rel=1e-12)


def test_modal_constants_limits(ctx_half):
    small = modal_constants(1e-12, ctx_half)
    assert small.gamma_i == pytest.approx(0.0, abs=1e-11)
    assert small.zeta_i == pytest.approx(1.0, abs=1e-11)
    assert small.k_i == pytest.approx(0.5 / ctx_half.b_of_alpha, rel=1e-10)

    near_one = modal_constants(PI2, AlphaContext(1.0 - 1e-7))
    assert near_one.gamma_i == pytest.approx(PI2, rel=1e-4)
    assert near_one.zeta_i == pytest.approx(1.0, rel=1e-4)
    assert near_one.k_i == pytest.approx(1.0, rel=1e-4)


def test_modal_constants_reject_bad_input(ctx_half):
    with pytest.raises(GridError):
        modal_constants(0.0, ctx_half)
    with pytest.raises(OrderDomainError):
        modal_constants(PI2, AlphaContext(1.0))


def test_free_mode_starts_at_zeta_and_decays(ctx_half, unit_grid):
    mc = modal_constants(PI2, ctx_half)
    y = solve_modal(1.0, TimeSeries.zeros(unit_grid), mc, ctx_half).values
    assert y[0] == pytest.approx(mc.zeta_i, rel=1e-12)
    assert np.all(np.diff(y) < 0)
    assert np.all(y > 0)


def test_constant_forcing_reaches_steady_state(ctx_half):
    grid = TimeGrid(1e12, 4)
    mc = modal_constants(PI2, ctx_half)
    y = solve_modal(0.0, TimeSeries(grid, np.ones(5)), mc, ctx_half).values
    assert y[-1] == pytest.approx(1.0 / PI2, rel=1e-6)


def test_gamma_weighted_constant_misses_steady_state(ctx_half):
    grid = TimeGrid(1e12, 4)
    mc = modal_constants(PI2, ctx_half, gamma_weighted_k=True)
    y = solve_modal(0.0, TimeSeries(grid, np.ones(5)), mc, ctx_half).values
    assert abs(y[-1] - 1.0 / PI2) > 0.1 / PI2


def test_vanishing_eigenvalue_reduces_to_ab_integral(ctx_half, unit_grid):
    f = TimeSeries.from_function(unit_grid, lambda t: np.cos(2.0 * t) + t)
    y = solve_modal(0.0, f, modal_constants(1e-12, ctx_half), ctx_half)
    np.testing.assert_allclose(y.values, ab_integral(f, ctx_half).values, atol=1e-8)


def test_near_classical_order_matches_heat_decay():
    ctx = AlphaContext(0.999)
    grid = TimeGrid(1.0, 1000)
    y = solve_modal(1.0, TimeSeries.zeros(grid), modal_constants(PI2, ctx), ctx)
    assert np.max(np.abs(y.values - np.exp(-PI2 * grid.nodes))) <= 1e-2


def test_solve_forward_single_mode(ctx_half, unit_grid, small_basis):
    y = solve_forward(small_basis.unit(1), None, ctx_half, unit_grid)
    mc = modal_constants(PI2, ctx_half)
    assert y.initial is not None
    assert y.values[0, 0] == pytest.approx(mc.zeta_i)
    np.testing.assert_array_equal(y.values[1:], 0.0)
    expected = solve_modal(1.0, TimeSeries.zeros(unit_grid), mc, ctx_half)
    np.testing.assert_allclose(y.values[0], expected.values, rtol=1e-14)


def test_solve_forward_zero_data(ctx_half, unit_grid, small_basis):
    y = solve_forward(small_basis.zeros(), None, ctx_half, unit_grid)
    assert not np.any(y.values)


def test_parabola_initial_datum(ctx_half):
    basis = SpectralBasis(n_modes=32)
    grid = TimeGrid(1.0, 50)
    y0 = project(lambda x: x * (1.0 - x), basis)
    y = solve_forward(y0, None, ctx_half, grid)
    assert reconstruct(y.initial, [0.5])[0] == pytest.approx(0.25, abs=1e-3)

    zetas = np.array([modal_constants(lam, ctx_half).zeta_i for lam in basis.eigenvalues])
    np.testing.assert_allclose(y.values[:, 0], zetas * y0.coeffs, atol=1e-15)
    np.testing.assert_allclose(initial_jump(y), (zetas - 1.0) * y0.coeffs, atol=1e-15)
    assert y.reconstruct([0.0, 0.5, 1.0]).shape == (51, 3)


def test_superposition(ctx_half, unit_grid, small_basis, rng):
    y0a = small_basis.unit(1) * rng.normal()
    y0b = small_basis.unit(3) * rng.normal()
    fa = Field(small_basis, unit_grid, rng.normal(size=(4, 201)))
    fb = Field(small_basis, unit_grid, rng.normal(size=(4, 201)))
    combined = solve_forward(y0a + y0b, fa + fb, ctx_half, unit_grid)
    separate = solve_forward(y0a, fa, ctx_half, unit_grid) + solve_forward(y0b, fb, ctx_half, unit_grid)
    np.testing.assert_allclose(combined.values, separate.values, atol=1e-12)


def test_thread_count_does_not_change_result(ctx_half, unit_grid, small_basis, rng):
    f = Field(small_basis, unit_grid, rng.normal(size=(4, 201)))
    y0 = project(lambda x: x * (1.0 - x), small_basis)
    one = solve_forward(y0, f, ctx_half, unit_grid, threads=1)
    four = solve_forward(y0, f, ctx_half, unit_grid, threads=4)
    np.testing.assert_array_equal(one.values, four.values)


def test_map_modes_keeps_order():
    assert map_modes(lambda i: i * i, 7, threads=3) == [0, 1, 4, 9, 16, 25, 36]


def test_compatible_data_residual_converges(ctx_half):
    basis = SpectralBasis(n_modes=1)
    y0 = basis.unit(1)
    residuals = []
    for n in (25, 50, 100):
        grid = TimeGrid(1.0, n)
        f = Field.separable(basis.unit(1), TimeSeries.from_function(grid, lambda t: PI2 + t))
        y = solve_forward(y0, f, ctx_half, grid)
        assert abs(initial_jump(y)[0]) < 1e-14
        residuals.append(residual(y, f, ctx_half))
    assert residuals[0] > residuals[1] > residuals[2]
    assert np.log2(residuals[1] / residuals[2]) >= 0.9


def test_compatible_constant_forcing_is_stationary(ctx_half, unit_grid):
    basis = SpectralBasis(n_modes=1)
    f = Field.separable(basis.unit(1), TimeSeries(unit_grid, np.full(201, PI2)))
    y = solve_forward(basis.unit(1), f, ctx_half, unit_grid)
    np.testing.assert_allclose(y.values[0], 1.0, atol=1e-10)


def test_free_decay_residual_is_small(ctx_half, small_basis):
    grid = TimeGrid(1.0, 1000)
    y = solve_forward(small_basis.unit(1), None, ctx_half, grid)
    assert residual(y, None, ctx_half) <= 1e-4


def test_residual_detects_perturbation(ctx_half, small_basis):
    grid = TimeGrid(1.0, 400)
    y = solve_forward(small_basis.unit(1), None, ctx_half, grid)
    baseline = residual(y, None, ctx_half)
    values = np.array(y.values)
    values[0, 200] += 1e-3
    perturbed = Field(y.basis, y.grid, values, initial=y.initial)
    assert residual(perturbed, None, ctx_half) > 10.0 * baseline
    assert modal_residuals(perturbed, None, ctx_half).shape == (4,)


def test_solve_forward_rejects_mismatched_forcing(ctx_half, unit_grid, small_basis):
    with pytest.raises(BasisMismatchError):
        solve_forward(small_basis.zeros(), Field.zeros(SpectralBasis(n_modes=2), unit_grid), ctx_half, unit_grid)
    with pytest.raises(GridError):
        solve_forward(small_basis.zeros(), Field.zeros(small_basis, TimeGrid(1.0, 10)), ctx_half, unit_grid)
    with pytest.raises(GridError):
        Field(small_basis, unit_grid, np.zeros((4, 3)))
