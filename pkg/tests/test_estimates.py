import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from forward_solver import (
    Field,
    adjoint_apriori_check,
    apriori_check,
    apriori_constants,
    solve_forward,
    space_time_norm,
)
from frac_ops import AlphaContext, TimeGrid, TimeSeries
from spectral import ModalCoefficients, SpectralBasis


@pytest.fixture(scope="module")
def half_constants():
    return apriori_constants(AlphaContext(0.5), SpectralBasis(n_modes=4), TimeGrid(1.0, 100))


def test_constants_follow_their_formulas(half_constants):
    k = half_constants
    alpha, b, lam1 = 0.5, AlphaContext(0.5).b_of_alpha, np.pi ** 2
    g = gamma_fn(alpha)
    assert k.c_mlf >= 1.0
    assert k.c1 == pytest.approx(k.c_mlf * b / (1 - alpha) * math.sqrt(6.0 / lam1))
    assert k.c3 == pytest.approx(k.c_mlf * b * math.sqrt(6.0) / (lam1 * (1 - alpha)))
    assert k.lambda_big_1 == max(k.c1, k.c2)
    assert k.lambda_big_2 == max(k.c3, k.c4)
    assert k.lambda_big_4 == pytest.approx(math.sqrt(2 + 4 * k.c_mlf ** 2 * (1 + 1 / g ** 2)))


def test_space_time_norm_of_constant():
    grid = TimeGrid(2.0, 10)
    values = np.ones((3, 11))
    assert space_time_norm(values, grid) == pytest.approx(math.sqrt(6.0))
    assert space_time_norm(values, grid, np.array([1.0, 0.0, 0.0])) == pytest.approx(math.sqrt(2.0))


def test_zero_data_passes_every_bound(half_constants):
    basis, grid = SpectralBasis(n_modes=4), TimeGrid(1.0, 100)
    y = solve_forward(basis.zeros(), None, AlphaContext(0.5), grid)
    report = apriori_check(y, basis.zeros(), None, half_constants)
    assert report.passed
    names = {check.name for check in report.checks}
    assert names == {"l2_h10", "sup_l2", "l2_l2", "l2_h2_free", "l2_h2_forced"}
    assert all(check.measured == 0.0 for check in report.checks)


def test_free_and_forced_corollaries(half_constants):
    ctx, basis, grid = AlphaContext(0.5), SpectralBasis(n_modes=4), TimeGrid(1.0, 100)
    free = apriori_check(solve_forward(basis.unit(2), None, ctx, grid), basis.unit(2), None, half_constants)
    assert free.passed
    assert "l2_h2_forced" not in {check.name for check in free.checks}
    assert 0.0 < free.by_name("l2_h2_free").slack_ratio <= 1.0

    f = Field.separable(basis.unit(1), TimeSeries.from_function(grid, np.sin))
    forced = apriori_check(solve_forward(basis.zeros(), f, ctx, grid), basis.zeros(), f, half_constants)
    assert forced.passed
    assert "l2_h2_free" not in {check.name for check in forced.checks}
    with pytest.raises(KeyError):
        forced.by_name("l2_h2_free")


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_random_smooth_instances_respect_bounds(alpha):
    rng = np.random.default_rng(int(alpha * 100))
    ctx, basis, grid = AlphaContext(alpha), SpectralBasis(n_modes=4), TimeGrid(1.0, 64)
    constants = apriori_constants(ctx, basis, grid)
    decay = 1.0 / np.arange(1, 5) ** 2
    for _ in range(25):
        y0 = ModalCoefficients(basis, rng.normal(size=4) * decay)
        omega, phase = rng.uniform(0.5, 3.0), rng.uniform(0.0, np.pi)
        profile = ModalCoefficients(basis, rng.normal(size=4) * decay)
        f = Field.separable(profile, TimeSeries.from_function(grid, lambda t: np.sin(omega * t + phase)))
        y = solve_forward(y0, f, ctx, grid)
        report = apriori_check(y, y0, f, constants)
        assert report.passed, [c for c in report.checks if not c.passed]


def test_adjoint_bound(half_constants, rng):
    basis, grid = SpectralBasis(n_modes=4), TimeGrid(1.0, 100)
    source = Field(basis, grid, rng.normal(size=(4, 101)))
    eta = solve_forward(basis.zeros(), source.reversed(), AlphaContext(0.5), grid).reversed()
    check = adjoint_apriori_check(eta, source, half_constants)
    assert check.name == "adjoint_l2_h10"
    assert check.passed
