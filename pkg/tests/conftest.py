import numpy as np
import pytest

from config import Config
from frac_ops import AlphaContext, TimeGrid
from spectral import SpectralBasis


@pytest.fixture(autouse=True)
def reset_config():
    # runs after monkeypatch has restored the environment, so no setting outlives its test
    Config.reload()
    yield
    Config.reload()


@pytest.fixture
def ctx_half():
    return AlphaContext(0.5)


@pytest.fixture
def unit_grid():
    return TimeGrid(1.0, 200)


@pytest.fixture
def small_basis():
    return SpectralBasis(length_l=1.0, n_modes=4, quad_points=512)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
