"""Errors raised by the control layer"""


class PreconditionError(ValueError):
    """Problem data violates an assumption of the operation (n_reg <= 0, phi(T) != 0, ...)"""
