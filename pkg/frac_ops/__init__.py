"""Discrete Atangana-Baleanu fractional operators"""
from .context import AlphaContext
from .errors import GridError, OrderDomainError
from .operators import (
    ProductWeights,
    ab_integral,
    abc_derivative_left,
    abc_derivative_right,
    abr_derivative_left,
    product_weights,
)
from .series import TimeGrid, TimeSeries

__all__ = [
    'AlphaContext',
    'GridError',
    'OrderDomainError',
    'ProductWeights',
    'TimeGrid',
    'TimeSeries',
    'ab_integral',
    'abc_derivative_left',
    'abc_derivative_right',
    'abr_derivative_left',
    'product_weights',
]
