"""Errors raised by the discrete fractional operators"""


class OrderDomainError(ValueError):
    """Fractional order outside the range an operator accepts"""


class GridError(ValueError):
    """Time grid too coarse, or series sampled on different grids"""
