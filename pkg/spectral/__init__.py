"""Dirichlet sine eigenbasis of the 1-D Laplacian"""
from .errors import BasisMismatchError, SpectralDomainError
from .sine_basis import ModalCoefficients, Norms, SpectralBasis, norms, project, reconstruct

__all__ = [
    'BasisMismatchError',
    'ModalCoefficients',
    'Norms',
    'SpectralBasis',
    'SpectralDomainError',
    'norms',
    'project',
    'reconstruct',
]
