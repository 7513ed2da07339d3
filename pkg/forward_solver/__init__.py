"""Spectral forward solver for the Atangana-Baleanu diffusion problem"""
from .errors import NumericalError
from .estimates import (
    AprioriConstants,
    AprioriReport,
    BoundCheck,
    adjoint_apriori_check,
    apriori_check,
    apriori_constants,
    space_time_norm,
)
from .field import Field
from .solver import (
    ModalConstants,
    ModalPropagator,
    initial_jump,
    map_modes,
    modal_constants,
    modal_propagator,
    modal_residuals,
    residual,
    solve_forward,
    solve_modal,
)

__all__ = [
    'AprioriConstants',
    'AprioriReport',
    'BoundCheck',
    'Field',
    'ModalConstants',
    'ModalPropagator',
    'NumericalError',
    'adjoint_apriori_check',
    'apriori_check',
    'apriori_constants',
    'initial_jump',
    'map_modes',
    'modal_constants',
    'modal_propagator',
    'modal_residuals',
    'residual',
    'solve_forward',
    'solve_modal',
]
