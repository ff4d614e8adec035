import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apsumma.apfun import APFunction
from apsumma.errors import ValidationError
from apsumma.kernels import (KernelParams, QuadratureConfig, geometric_sine_sum_closed,
                             geometric_sine_sum_direct, kappa_index, kernel_basis_integrals,
                             kernel_partial_sum, kernel_threshold_sum, psi, psi_k)
from apsumma.strong_means import threshold_partial_sum

import oracles
from conftest import cos_function


def test_psi_examples():
    assert psi(KernelParams(0.0, 1.0), 1e-8) == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    assert psi(KernelParams(0.0, 1.0), math.pi) == pytest.approx(2 / math.pi ** 3, rel=1e-12)
    with pytest.raises(ValidationError):
        KernelParams(1.0, 1.0)


@given(st.floats(0.1, 4.0), st.integers(0, 64), st.floats(-200, 200))
def test_psi_k_matches_psi(alpha, k, t):
    a = psi_k(alpha, k, t)
    b = psi(KernelParams(alpha * k / 2, alpha * (k + 1) / 2), t)
    assert a == pytest.approx(b, rel=1e-11, abs=1e-14)


def test_taylor_branch_continuous():
    p = KernelParams(0.5, 1.5)
    t = np.array([0.99e-6, 1.01e-6])
    v = psi(p, t)
    assert abs(v[0] - v[1]) < 1e-10
    assert psi(p, 0.0) == pytest.approx(2.0 / (2 * math.pi))


@pytest.mark.parametrize("k", [0, 1, 5, 20])
def test_basis_integrals_match_sine_integral(k):
    alpha = 1.0
    lam = np.array([1.0, 1.7, 3.2, 9.5])
    T = 2000.0
    J, err = kernel_basis_integrals(lam, alpha, k, T, 4)
    ref = np.array([oracles.kernel_integral(l, alpha, k, T) for l in lam])
    assert np.allclose(J, ref, atol=1e-9)
    assert np.all(err < 1e-6)


def test_basis_integral_limits():
    # as T grows J_k(lam) is 0 inside the band and -1/2 beyond it (the half-line doubles)
    alpha, k = 1.0, 6
    lam = np.array([1.0, 2.0, 4.0, 6.0])
    inside = lam <= alpha * k / 2
    ref = np.array([oracles.kernel_integral(l, alpha, k, math.inf) for l in lam])
    assert np.allclose(ref, np.where(inside, 0.0, -0.5), atol=1e-12)


def test_kappa_index():
    f = APFunction.from_terms([(0, 1), (1.25, 1), (3.0, 1)], 1.0)
    assert kappa_index(f, 2) == 1
    assert kappa_index(f, 1) is None
    assert kappa_index(f, 5) is None  # 3.0 is an endpoint, not interior


def test_kernel_partial_sum_cos():
    f = cos_function()
    for k in (0, 1, 2, 3):
        ks = kernel_threshold_sum(f, 0.3, k)
        exact = threshold_partial_sum(f, 0.3, k / 2)
        assert abs(ks.value - exact) <= 1e-6 + ks.tail_bound
        assert ks.converged


def test_tail_bound_formula():
    f = cos_function()
    cfg = QuadratureConfig(tail_cutoff=500.0)
    ks = kernel_partial_sum(f, 0.0, 1, cfg)
    # sup |phi_x| <= 4 * sum |c| with c = f-coefficient pair at x = 0
    assert ks.tail_bound == pytest.approx(8 * 4 * 1.0 / (math.pi * 500.0))
    assert ks.cutoff == 500.0


def test_default_cutoff():
    cfg = QuadratureConfig()
    assert cfg.cutoff(0.5, 3) == pytest.approx(2e4)
    assert cfg.cutoff(1.0, 30) == pytest.approx(3.1e4)


@pytest.mark.parametrize("bad", [{"tail_cutoff": -1.0}, {"panels_per_oscillation": 3},
                                 {"abs_tolerance": 0.0}])
def test_quadrature_validation(bad):
    with pytest.raises(ValidationError):
        QuadratureConfig(**bad)


def test_geometric_sine_sum_worked_point():
    assert geometric_sine_sum_closed(0.5, math.pi / 2, math.pi / 2) == pytest.approx(1.0, abs=1e-14)
    assert geometric_sine_sum_direct(0.5, math.pi / 2, math.pi / 2, 200) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        geometric_sine_sum_closed(1.0, 1.0, 1.0)


@given(st.floats(0, 0.95), st.floats(0.05, math.pi - 0.05), st.floats(0.05, math.pi - 0.05))
def test_geometric_sine_sum_property(r, y, z):
    N = 800
    direct = geometric_sine_sum_direct(r, y, z, N)
    assert abs(geometric_sine_sum_closed(r, y, z) - direct) <= 1e-10 + r ** N / (1 - r)
