"""Numba and numpy kernels must agree; skipped when numba is unavailable."""
import numpy as np
import pytest

from apsumma import _hot_numpy
from apsumma._accel import HAVE_NUMBA, backend_name

nb = pytest.importorskip("apsumma._hot_numba") if HAVE_NUMBA else None
pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")

GL_X, GL_W = np.polynomial.legendre.leggauss(8)
rng = np.random.default_rng(7)
LAM = np.array([0.0, 1.0, 2.3, 4.1, 7.9])
AP = rng.normal(size=5) + 1j * rng.normal(size=5)
AM = np.concatenate(([0], rng.normal(size=4) + 1j * rng.normal(size=4)))


def test_trig_eval_parity():
    x = np.linspace(-30, 30, 1001)
    assert np.allclose(nb.trig_eval(LAM, AP, AM, x), _hot_numpy.trig_eval(LAM, AP, AM, x),
                       rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_abs_power_integrals_parity(p):
    lo = np.array([0.0, 1.0, 5.0])
    hi = lo + np.pi
    a = nb.abs_power_integrals(LAM, AP, AM, lo, hi, p, 0.1, GL_X, GL_W)
    b = _hot_numpy.abs_power_integrals(LAM, AP, AM, lo, hi, p, 0.1, GL_X, GL_W)
    assert np.allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("k", [0, 3, 17])
def test_kernel_basis_parity(k):
    lam = LAM[1:]
    a = nb.kernel_basis(lam, 1.0, k, 500.0, 0.05, GL_X, GL_W)
    b = _hot_numpy.kernel_basis(lam, 1.0, k, 500.0, 0.05, GL_X, GL_W)
    assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


def test_backend_name_reports_selection():
    assert backend_name() in ("numba", "numpy")


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("true", "numpy"), ("0", "numba")])
def test_env_flag_selects_backend(flag, expected):
    import os
    import subprocess
    import sys
    env = dict(os.environ, APSUMMA_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c",
                          "from apsumma._accel import backend_name; print(backend_name())"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == expected
