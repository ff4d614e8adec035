import json
import math
import os

import numpy as np
import pytest

from apsumma.apfun import APFunction
from apsumma.errors import ValidationError
from apsumma.harness import (OmegaCache, RatioReport, fitted_moduli, jackson_constants,
                             nondivergence, nondivergence_pass, prop4_ratio, prop4_table,
                             remark7_ratio, safe_ratio, thm2_norm_ratio, thm2_table,
                             thm3_comparison, thm3_rhs, thm5_ratio, thm6_ratio)
from apsumma.moduli import best_approx_bracket, default_delta_grid, fit_modulus
from apsumma.strong_means import k_stop, strong_mean
from apsumma.summability import explicit_row, generate_row

from conftest import cos_function

CONST = APFunction.from_terms([(0, 2.0)], 1.0)
GRID = default_delta_grid(16)


def test_ratio_rules():
    assert math.isnan(safe_ratio(0.0, 0.0))
    assert safe_ratio(1.0, 0.0) == math.inf
    assert safe_ratio(0.0, 2.0) == 0.0
    with pytest.raises(ValidationError):
        RatioReport("prop4", "f", 0.0, 1, 1.0, -1.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        RatioReport("prop4", "f", 0.0, 1, 1.0, 1.0, 2.0, 1.0)
    r = RatioReport("prop4", "f", 0.0, 1, 1.0, 0.0, 0.0, 0.0)
    assert r.csv_row()[10] == "undefined"


def test_prop4_cos_example():
    f = cos_function()
    w = fit_modulus(f, 0.0, GRID)
    r = prop4_ratio(f, 0.0, 1, 2.0, w)
    assert r.lhs == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    # both dropped coefficients are 1/2: lower is their max, upper their sum
    b = best_approx_bracket(f, 0.5)
    assert (b.lower, b.upper) == (0.5, 1.0)
    assert r.rhs_lower == pytest.approx(w(math.pi / 2) + 0.5)
    assert r.rhs_upper == pytest.approx(w(math.pi / 2) + 1.0)


def test_prop4_constant_and_reproduction(corpus):
    w0 = fit_modulus(CONST, 0.0, GRID)
    r = prop4_ratio(CONST, 0.0, 3, 1.0, w0)
    assert r.lhs == 0.0 and (r.ratio == 0.0 or math.isnan(r.ratio))
    _, f, _ = corpus[1]
    w = fit_modulus(f, 0.4, GRID)
    ns = list(range(1, 3 * k_stop(f, f.alpha)))
    for r in prop4_table(f, 0.4, ns, 1.5, w):
        if f.alpha * r.n / 2 >= f.lam_max:
            assert r.lhs == 0.0 and r.rhs_upper == pytest.approx(w(math.pi / (r.n + 1)))


def test_prop4_table_matches_pointwise(corpus):
    _, f, _ = corpus[1]
    w = fit_modulus(f, 1.3, GRID)
    table = prop4_table(f, 1.3, range(2, 20), 1.0, w)
    for r in table:
        p = prop4_ratio(f, 1.3, r.n, 1.0, w)
        assert r.lhs == pytest.approx(p.lhs, rel=1e-9, abs=1e-14)
        assert r.rhs_lower == pytest.approx(p.rhs_lower, rel=1e-12)
    with pytest.raises(ValidationError):
        prop4_ratio(f, 1.3, 2, 2.5, w)


def test_thm5_uses_integer_part_of_c(corpus):
    _, f, _ = corpus[2]
    w = fit_modulus(f, 0.0, GRID)
    row = generate_row("cesaro", 12)
    for c in (2.0, 2.7, 3.0):
        r = thm5_ratio(f, 0.0, 12, 1.0, row, c, w)
        div = 2 ** (1 + int(math.floor(c)))
        terms = [w(math.pi / (k + 1)) + best_approx_bracket(f, f.alpha * k / div).lower
                 for k in range(13)]
        assert r.rhs_lower == pytest.approx(sum(terms) / 13, rel=1e-12)
        assert r.metadata["e_divisor"] == div
        assert r.lhs == pytest.approx(strong_mean(f, 0.0, row, 1.0), rel=1e-12)


def test_thm5_flags_rows_outside_class(corpus):
    _, f, _ = corpus[1]
    w = fit_modulus(f, 0.0, GRID)
    bad = explicit_row([0.5, 0.0, 0.0, 0.0, 0.5])
    assert "row_not_gm2beta" in thm5_ratio(f, 0.0, 4, 1.0, bad, 1.5, w).flags
    assert thm5_ratio(CONST, 0.0, 4, 1.0, generate_row("cesaro", 4), 2.0, fit_modulus(CONST, 0.0, GRID)).lhs == 0


def test_thm5_abel_truncation(corpus):
    _, f, _ = corpus[1]
    w = fit_modulus(f, 0.0, GRID)
    r = thm5_ratio(f, 0.0, 8, 2.0, generate_row("abel", 8), 2.0, w)
    assert r.metadata["truncation_bound"] < 1e-12
    assert math.isfinite(r.ratio)


def test_thm6_rejects_non_ms_rows(corpus):
    _, f, _ = corpus[1]
    w = fit_modulus(f, 0.0, GRID)
    with pytest.raises(ValidationError):
        thm6_ratio(f, 0.0, 2, 1.0, generate_row("riesz", 2), w)
    r = thm6_ratio(f, 0.0, 6, 1.0, generate_row("cesaro", 6), w)
    assert r.rhs_lower <= r.rhs_upper


def test_thm3_examples(corpus):
    r = thm3_comparison(CONST, 5, 2.0)
    assert r.lhs == 0.0 and r.rhs_lower == pytest.approx(2.0 / math.sqrt(6))
    with pytest.raises(ValidationError):
        thm3_comparison(CONST, 5, 1.5)
    _, f, _ = corpus[1]
    om = OmegaCache(f, math.inf)
    small, big = thm3_rhs(f, 4, 2.0, om), thm3_rhs(f, 400, 2.0, om)
    assert big < small


def test_thm2_single_exponential():
    # |f| = 1 and every deviation below the exponent is |f(x)| = 1
    f = APFunction.from_terms([(0, 0), (1.0, 1.0)], 1.0)
    row = generate_row("cesaro", 4)
    r = thm2_norm_ratio(f, 4, 2.0, row)
    assert r.lhs == pytest.approx(math.sqrt(2 / 5), rel=1e-9)
    # ||e^{i(.+t)} - e^{i.}|| = 2|sin(t/2)| for every p
    om = OmegaCache(f, 2.0)
    assert om(math.pi / 2)[0] == pytest.approx(2 * math.sin(math.pi / 4), rel=1e-3)
    assert thm2_norm_ratio(CONST, 4, 2.0, row).lhs == 0.0


def test_thm2_table_matches_single(corpus):
    _, f, _ = corpus[4]
    rows = [(n, generate_row("cesaro", n)) for n in (2, 5, 9)]
    table = thm2_table(f, rows, 2.0)
    for (n, row), t in zip(rows, table):
        s = thm2_norm_ratio(f, n, 2.0, row)
        assert t.lhs == pytest.approx(s.lhs, rel=1e-12)
        assert t.rhs_lower == pytest.approx(s.rhs_lower, rel=1e-12)


def test_remark7_ratio_against_pins(corpus):
    pins = json.load(open(os.path.join(os.path.dirname(__file__), "data", "pins.json")))["remark7"]
    fid, f, _ = corpus[1]
    from apsumma.harness import default_x_grid
    ws = fitted_moduli(f, default_x_grid(f, 17))
    want = {r["n"]: r for r in pins["rows"] if r["f_id"] == fid}
    for n in (2, 16):
        r = remark7_ratio(f, n, ws, OmegaCache(f, math.inf), fid)
        assert r.ratio == pytest.approx(want[n]["ratio"], rel=1e-9)


def test_jackson_constants_finite(corpus):
    _, f, _ = corpus[1]
    sig = np.linspace(0.5, 2 * f.lam_max, 9)
    jc = jackson_constants(f, sig)
    assert np.all(np.isfinite(jc[~np.isnan(jc)]))


def test_nondivergence_statistic():
    ns = [2, 3, 4, 5, 6, 7, 8]
    up, lo = nondivergence(ns, [1, 2, 1, 3, float("nan"), 2, 6], 4)
    assert (up, lo) == (6.0, 2.0)
    assert nondivergence_pass(6.0, 2.0) and not nondivergence_pass(6.1, 2.0)
    assert nondivergence_pass(0.0, 0.0)
    assert not nondivergence_pass(math.inf, 1.0)
