"""Errors raised by the spectral layer"""


class SpectralDomainError(ValueError):
    """Spatial function or evaluation point outside [0, L]"""


class BasisMismatchError(ValueError):
    """Coefficients or fields built on different bases"""
