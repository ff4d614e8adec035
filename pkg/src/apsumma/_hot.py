"""Dispatch to the selected kernel backend (see ``_accel``)."""
import numpy as np

from ._accel import USE_NUMBA

if USE_NUMBA:
    from ._hot_numba import abs_power_integrals, kernel_basis, trig_eval
else:
    from ._hot_numpy import abs_power_integrals, kernel_basis, trig_eval

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(8)

__all__ = ["trig_eval", "abs_power_integrals", "kernel_basis", "GL_NODES", "GL_WEIGHTS"]
