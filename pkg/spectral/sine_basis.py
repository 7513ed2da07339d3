"""
Sine Eigenbasis
Eigenpairs of A y = -y'' on (0, L) with Dirichlet conditions, modal transforms and norms
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy.integrate import simpson

from .errors import BasisMismatchError, SpectralDomainError

logger = logging.getLogger(__name__)

SpatialSample = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]

_ENDPOINT_SLACK = 1e-12


@dataclass(frozen=True)
class SpectralBasis:
    """First n_modes normalised sines sqrt(2/L) sin(k pi x / L), eigenvalues (k pi / L)^2"""

    length_l: float = 1.0
    n_modes: int = 64
    quad_points: int = 4096

    def __post_init__(self):
        if not self.length_l > 0:
            raise SpectralDomainError(f"length_l must be positive, got {self.length_l}")
        if self.n_modes < 1:
            raise SpectralDomainError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.quad_points < 2 or self.quad_points % 2:
            raise SpectralDomainError(f"quad_points must be a positive even number, got {self.quad_points}")

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        k = np.arange(1, self.n_modes + 1, dtype=float)
        values = (k * np.pi / self.length_l) ** 2
        values.setflags(write=False)
        return values

    def mode(self, k: int, x) -> np.ndarray:
        """k-th eigenfunction (1-based)"""
        return np.sqrt(2.0 / self.length_l) * np.sin(k * np.pi * np.asarray(x, dtype=float) / self.length_l)

    def mode_derivative(self, k: int, x) -> np.ndarray:
        wave = k * np.pi / self.length_l
        return np.sqrt(2.0 / self.length_l) * wave * np.cos(wave * np.asarray(x, dtype=float))

    @cached_property
    def quad_nodes(self) -> np.ndarray:
        nodes = np.linspace(0.0, self.length_l, self.quad_points + 1)
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def _mode_table(self) -> np.ndarray:
        table = np.stack([self.mode(k, self.quad_nodes) for k in range(1, self.n_modes + 1)])
        table.setflags(write=False)
        return table

    def integrate(self, samples: np.ndarray) -> np.ndarray:
        """Composite Simpson over [0, L] along the last axis"""
        return simpson(samples, x=self.quad_nodes, axis=-1)

    def bilinear_form(self, i: int, j: int) -> float:
        """a(w_i, w_j) = int w_i' w_j' by quadrature"""
        x = self.quad_nodes
        return float(self.integrate(self.mode_derivative(i, x) * self.mode_derivative(j, x)))

    def zeros(self) -> "ModalCoefficients":
        return ModalCoefficients(self, np.zeros(self.n_modes))

    def unit(self, k: int) -> "ModalCoefficients":
        """Coefficients of the single mode w_k"""
        if not 1 <= k <= self.n_modes:
            raise SpectralDomainError(f"mode index {k} outside 1..{self.n_modes}")
        coeffs = np.zeros(self.n_modes)
        coeffs[k - 1] = 1.0
        return ModalCoefficients(self, coeffs)


class ModalCoefficients:
    """Coefficients (y, w_k) of a spatial function in a SpectralBasis"""

    def __init__(self, basis: SpectralBasis, coeffs):
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.shape != (basis.n_modes,):
            raise BasisMismatchError(f"expected {basis.n_modes} coefficients, got shape {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise SpectralDomainError("modal coefficients must be finite")
        coeffs.setflags(write=False)
        self.basis = basis
        self.coeffs = coeffs

    def check_same_basis(self, other_basis: SpectralBasis) -> None:
        if self.basis != other_basis:
            raise BasisMismatchError(f"basis mismatch: {self.basis} vs {other_basis}")

    def __add__(self, other: "ModalCoefficients") -> "ModalCoefficients":
        self.check_same_basis(other.basis)
        return ModalCoefficients(self.basis, self.coeffs + other.coeffs)

    def __mul__(self, scalar: float) -> "ModalCoefficients":
        return ModalCoefficients(self.basis, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"ModalCoefficients(n_modes={self.basis.n_modes}, L={self.basis.length_l})"


class Norms(NamedTuple):
    l2: float
    h10: float
    h2: float


def project(sample: SpatialSample, basis: SpectralBasis) -> ModalCoefficients:
    """
    Analysis transform coeffs[k] = int_0^L sample(x) w_k(x) dx.

    Args:
        sample: Callable on [0, L] or its values at basis.quad_nodes
        basis: Target basis

    Returns:
        Modal coefficients of the sample
    """
    x = basis.quad_nodes
    if callable(sample):
        try:
            values = np.broadcast_to(np.asarray(sample(x), dtype=float), x.shape)
        except Exception as e:
            raise SpectralDomainError(f"sample is not evaluable on [0, {basis.length_l}]: {e}") from e
    else:
        values = np.asarray(sample, dtype=float)
        if values.shape != x.shape:
            raise SpectralDomainError(f"expected {x.shape[0]} samples on the quadrature grid, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise SpectralDomainError("sample has non-finite values on [0, L]")

    scale = max(1.0, float(np.max(np.abs(values))))
    if abs(values[0]) > 1e-8 * scale or abs(values[-1]) > 1e-8 * scale:
        logger.warning("projected sample does not vanish at the Dirichlet endpoints")

    return ModalCoefficients(basis, basis.integrate(basis._mode_table * values))


def reconstruct(mc: ModalCoefficients, x_nodes) -> np.ndarray:
    """Synthesis sum_k coeffs[k] w_k(x), accumulated in ascending k."""
    x = np.asarray(x_nodes, dtype=float)
    length = mc.basis.length_l
    if np.any(x < -_ENDPOINT_SLACK) or np.any(x > length + _ENDPOINT_SLACK):
        raise SpectralDomainError(f"evaluation points must lie in [0, {length}]")
    out = np.zeros_like(x)
    for k, c in enumerate(mc.coeffs, start=1):
        if c != 0.0:
            out += c * mc.basis.mode(k, x)
    return out


def norms(mc: ModalCoefficients) -> Norms:
    """L2 (Parseval), H1_0 and H2 norms with eigenvalue weights 1, lambda, lambda^2."""
    c2 = mc.coeffs ** 2
    lam = mc.basis.eigenvalues
    return Norms(
        l2=float(np.sqrt(np.sum(c2))),
        h10=float(np.sqrt(np.sum(lam * c2))),
        h2=float(np.sqrt(np.sum(lam ** 2 * c2))),
    )
