"""Strong approximation of almost periodic functions by matrix means of partial sums.

Finite trigonometric sums with separated exponents, the kernel and threshold
routes to their partial sums, strong matrix means, general-monotone row
classes, moduli of continuity and a ratio harness for the approximation
inequalities.
"""
__version__ = "0.1.0"

from ._accel import backend_name
from .apfun import APFunction, Term, evaluate, exact_coefficient, bohr_coefficient, stepanov_norm
from .errors import ConvergenceError, ValidationError
from .kernels import (KernelParams, QuadratureConfig, kernel_partial_sum, kernel_threshold_sum,
                      psi, psi_k)
from .summability import MatrixRow, explicit_row, generate_row, hierarchy_check
from .strong_means import strong_mean, threshold_partial_sum
from .moduli import ModulusFunction, best_approx_bracket, fit_modulus

__all__ = [
    "APFunction", "Term", "evaluate", "exact_coefficient", "bohr_coefficient", "stepanov_norm",
    "ConvergenceError", "ValidationError", "KernelParams", "QuadratureConfig",
    "kernel_partial_sum", "kernel_threshold_sum", "psi", "psi_k", "MatrixRow", "explicit_row",
    "generate_row", "hierarchy_check", "strong_mean", "threshold_partial_sum", "ModulusFunction",
    "best_approx_bracket", "fit_modulus", "backend_name", "__version__",
]
