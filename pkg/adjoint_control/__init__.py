"""Adjoint-based optimal control of the fractional diffusion problem"""
from .errors import PreconditionError
from .optimizer import (
    METHODS,
    OptimalityReport,
    adjoint_residual,
    adjointness_defect,
    control_to_state,
    cost,
    duality_check,
    optimize,
    reduced_gradient,
    solve_adjoint,
    state,
    verify_optimality,
)
from .problem import ControlProblem, OptimalityResult, inner, norm

__all__ = [
    'METHODS',
    'ControlProblem',
    'OptimalityReport',
    'OptimalityResult',
    'PreconditionError',
    'adjoint_residual',
    'adjointness_defect',
    'control_to_state',
    'cost',
    'duality_check',
    'inner',
    'norm',
    'optimize',
    'reduced_gradient',
    'solve_adjoint',
    'state',
    'verify_optimality',
]
