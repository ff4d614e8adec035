import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apsumma.apfun import (APFunction, Term, bohr_coefficient, bohr_error_envelope,
                           check_omega_membership, default_u_grid, evaluate, exact_coefficient,
                           phi, phi_trig, quasi_period, stepanov_norm, window_l2_means,
                           window_means)
from apsumma.errors import ValidationError

import oracles
from conftest import ap_functions, as_triples, cos_function


def test_evaluate_examples():
    assert evaluate(APFunction.from_terms([(0, 0), (1, 3)], 1.0), 0.0) == pytest.approx(3)
    assert evaluate(cos_function(), math.pi) == pytest.approx(-1)
    f = APFunction.from_terms([(0, 1), (2, 1j)], 2.0)
    assert abs(evaluate(f, math.pi / 4)) < 1e-15


def test_leading_zero_exponent_is_inserted():
    f = APFunction.from_terms([(1.0, 3.0)], 1.0)
    assert f.lam[0] == 0.0 and f.ap[0] == 0
    assert f.lam.tolist() == [0.0, 1.0]


@pytest.mark.parametrize("terms, alpha, msg", [
    ([(0, 1), (0.5, 1)], 1.0, "gap"),
    ([(0, 1), (2, 1), (1.5, 1)], 0.1, "increasing"),
    ([(0, 1), (1, 0, 0)], 1.0, "= 0"),
    ([(0, 1, 1)], 1.0, "a_minus"),
    ([(0, float("nan"))], 1.0, "finite"),
    ([(0, 1)], 0.0, "alpha"),
])
def test_invariants_rejected(terms, alpha, msg):
    with pytest.raises(ValidationError, match=msg):
        APFunction.from_terms(terms, alpha)


def test_gap_boundary_allowed():
    a = 0.7
    f = APFunction.from_terms([(0, 1), (a, 1), (2 * a, 1)], a)
    assert check_omega_membership(f, a)


def test_omega_membership_examples():
    f = APFunction.from_terms([(0, 1), (1, 1), (3, 1)], 1.0)
    assert check_omega_membership(f, 1.0)
    assert not check_omega_membership(f, 2.0)


def test_json_round_trip_and_loader_errors(tmp_path):
    f = APFunction.from_terms([(0, 0.25), (1.5, 1 + 2j, -0.5j)], 1.0)
    g = APFunction.from_json(f.to_json())
    assert g.to_json() == f.to_json()
    bad = {"alpha": 1.0, "terms": [{"lambda": 0, "a_plus": [1, 0], "a_minus": [0, 0]},
                                   {"lambda": 0.5, "a_plus": [1, 0], "a_minus": [0, 0]}]}
    with pytest.raises(ValidationError, match="gap"):
        APFunction.from_dict(bad)
    with pytest.raises(ValidationError):
        APFunction.from_json("{not json")


def test_phi_examples():
    f = cos_function()
    assert phi(f, 0.0, math.pi) == pytest.approx(-4)
    assert phi(f, 1.234, 0.0) == 0
    assert abs(phi(f, math.pi / 2, 0.77)) < 1e-15


@given(ap_functions(), st.floats(-10, 10), st.floats(-10, 10))
def test_phi_even_and_trig_form(f, x, t):
    assert abs(phi(f, x, t) - phi(f, x, -t)) <= 1e-12 * (1 + f.amplitude_sum)
    lam, ap, am = phi_trig(f, x)
    via_trig = complex(np.sum(ap * np.exp(1j * lam * t) + am * np.exp(-1j * lam * t)))
    assert abs(via_trig - phi(f, x, t)) <= 1e-11 * (1 + f.amplitude_sum)


@given(ap_functions(), st.floats(-50, 50))
def test_evaluate_matches_direct_sum_and_bound(f, x):
    v = evaluate(f, x)
    assert abs(v - oracles.evaluate(as_triples(f), x)) <= 1e-12 * (1 + f.amplitude_sum)
    assert abs(v) <= f.amplitude_sum * (1 + 1e-12) + 1e-300


def test_exact_coefficient_examples():
    f = APFunction.from_terms([(0, 0), (math.sqrt(2), 3)], 1.0)
    assert exact_coefficient(f, math.sqrt(2)) == 3
    assert exact_coefficient(f, 1.0) == 0
    assert exact_coefficient(cos_function(), -1.0) == 0.5


def test_bohr_coefficient_examples():
    f = APFunction.from_terms([(0, 0), (1, 3)], 1.0)
    for L in (0.3, 7.0, 1e4):
        assert bohr_coefficient(f, 1.0, L) == pytest.approx(3, abs=1e-15)
        v = bohr_coefficient(f, 0.0, L)
        assert v == pytest.approx(3 * (np.exp(1j * L) - 1) / (1j * L), abs=1e-14)
        assert abs(v) <= 6 / L + 1e-15
    assert bohr_coefficient(cos_function(), 1.0, 2 * math.pi * 1e3) == pytest.approx(0.5, abs=1e-3)
    with pytest.raises(ValidationError):
        bohr_coefficient(f, 0.0, 0.0)


def test_bohr_envelope_decays(corpus):
    for _, f, _ in corpus:
        for lam in np.concatenate((f.lam, -f.lam[1:])):
            e1 = bohr_error_envelope(f, float(lam), 1e3)
            e2 = bohr_error_envelope(f, float(lam), 2e3)
            assert e2 <= 0.75 * e1 or e1 < 1e-14


def test_quasi_period():
    assert quasi_period(cos_function()) == pytest.approx(2 * math.pi)
    f = APFunction.from_terms([(0, 0), (1.5, 1), (2.5, 1)], 1.0)
    assert quasi_period(f) == pytest.approx(4 * math.pi)
    g = APFunction.from_terms([(0, 0), (1, 1), (1 + math.sqrt(2), 1)], 1.0)
    assert quasi_period(g) is None
    assert quasi_period(APFunction.from_terms([(0, 1)], 1.0)) is None


def test_stepanov_examples():
    const = APFunction.from_terms([(0, 1)], 1.0)
    for p in (1, 2, 3.5, math.inf):
        assert stepanov_norm(const, p) == pytest.approx(1, rel=1e-12)
    single = APFunction.from_terms([(0, 0), (math.sqrt(2), 3)], 1.0)
    assert stepanov_norm(single, 1) == pytest.approx(3, rel=1e-12)
    assert stepanov_norm(cos_function(), math.inf) == pytest.approx(1, abs=1e-3)
    with pytest.raises(ValidationError):
        stepanov_norm(const, 0.5)
    with pytest.raises(ValidationError):
        stepanov_norm(const, 1, u_grid=[])


@given(ap_functions(max_terms=3))
def test_stepanov_power_mean_ordering(f):
    u = default_u_grid(f, 16)
    n1, n2, n3 = (stepanov_norm(f, p, u) for p in (1, 2, 3))
    tol = 1e-10 * (1 + f.amplitude_sum)
    assert n1 <= n2 + tol and n2 <= n3 + tol
    ninf = stepanov_norm(f, math.inf, u)
    # the sup is sampled, so it may sit slightly below the true maximum
    assert n3 <= ninf * (1 + 0.02) + tol


@given(ap_functions(max_terms=3))
def test_l2_window_closed_form_matches_quadrature(f):
    u = np.linspace(0, 20, 7)
    quad = window_means(f.lam, f.ap, f.am, u, 2.0, lam_max=f.lam_max)
    exact = window_l2_means(f.lam, f.ap, f.am, u)
    assert np.allclose(quad, exact, rtol=1e-10, atol=1e-12 * (1 + f.amplitude_sum) ** 2)


def test_functions_are_immutable():
    f = cos_function()
    with pytest.raises(ValueError):
        f.lam[0] = 3.0
    with pytest.raises(AttributeError):
        f.alpha = 2.0
