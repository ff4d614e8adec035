import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from apsumma.apfun import APFunction, Term
from apsumma.fixtures import generate_fixtures

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def corpus():
    return generate_fixtures(1, 8)


def cos_function(alpha=1.0):
    return APFunction((Term(0.0, 0j), Term(1.0, 0.5 + 0j, 0.5 + 0j)), alpha)


finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
amplitudes = st.builds(complex, finite, finite).filter(lambda z: abs(z) > 1e-3)


@st.composite
def ap_functions(draw, max_terms=5):
    alpha = draw(st.floats(0.25, 2.0))
    n = draw(st.integers(0, max_terms))
    extra = draw(st.lists(st.floats(0.0, 2.0), min_size=n, max_size=n))
    lam = np.cumsum([alpha + e for e in extra]) if n else []
    terms = [Term(0.0, draw(st.builds(complex, finite, finite)))]
    for l in lam:
        terms.append(Term(float(l), draw(amplitudes), draw(st.one_of(st.just(0j), amplitudes))))
    return APFunction(tuple(terms), alpha)


def as_triples(f):
    return [(float(l), complex(p), complex(m)) for l, p, m in zip(f.lam, f.ap, f.am)]


TWO_PI = 2.0 * math.pi


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
