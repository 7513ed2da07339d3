"""Mittag-Leffler special functions"""
from .errors import MlfAccuracyError, MlfDomainError
from .functions import (
    MlfAccuracy,
    MlfBoundEstimate,
    default_accuracy,
    kernel_first_moment,
    kernel_integral,
    kernel_primitive,
    mlf,
    mlf_bound_constant,
    mlf_generalized,
)

__all__ = [
    'MlfAccuracy',
    'MlfAccuracyError',
    'MlfBoundEstimate',
    'MlfDomainError',
    'default_accuracy',
    'kernel_first_moment',
    'kernel_integral',
    'kernel_primitive',
    'mlf',
    'mlf_bound_constant',
    'mlf_generalized',
]
