"""Errors raised by the forward solver"""


class NumericalError(ArithmeticError):
    """A solve produced non-finite values"""
