"""Deterministic corpus of test functions.

The first four entries are fixed (a constant, a single exponential, ``cos``
and a lacunary sum with exponents ``(2**nu - 1) alpha``); the rest are seeded
random alpha-separated sums drawn by rejection sampling.
"""
from __future__ import annotations

import json
import math
import os

import numpy as np

from .apfun import APFunction, Term, check_omega_membership
from .errors import ValidationError

AMPLITUDE_BUDGET = 10.0


def _fixed():
    return [
        ("constant", APFunction((Term(0.0, 1.5 + 0j),), 1.0)),
        ("single_exp", APFunction((Term(0.0, 0j), Term(math.sqrt(2.0), 1.0 + 0.5j)), 1.0)),
        ("cos", APFunction((Term(0.0, 0j), Term(1.0, 0.5 + 0j, 0.5 + 0j)), 1.0)),
        ("lacunary", APFunction(
            (Term(0.0, 0.25 + 0j),)
            + tuple(Term(float(2 ** nu - 1), 2.0 ** -nu + 0j, 0.5j * 2.0 ** -nu) for nu in range(1, 5)),
            1.0)),
    ]


def random_function(seed: int, index: int, max_tries: int = 100) -> APFunction:
    """Random alpha-separated sum with decaying amplitudes, ``sum |A| <= 10``."""
    rng = np.random.default_rng([seed, index])
    for _ in range(max_tries):
        alpha = round(float(rng.uniform(0.5, 2.0)), 3)
        nterms = int(rng.integers(2, 6))
        gaps = alpha + np.round(rng.exponential(0.5 * alpha, nterms), 4)
        lam = np.cumsum(gaps)
        decay = 0.7 ** np.arange(nterms)
        ap = (rng.normal(size=nterms) + 1j * rng.normal(size=nterms)) * decay
        am = (rng.normal(size=nterms) + 1j * rng.normal(size=nterms)) * decay
        a0 = complex(rng.normal(), 0.0)
        total = abs(a0) + np.sum(np.abs(ap)) + np.sum(np.abs(am))
        scale = min(1.0, AMPLITUDE_BUDGET / total)
        terms = (Term(0.0, a0 * scale),) + tuple(
            Term(float(l), complex(p * scale), complex(m * scale)) for l, p, m in zip(lam, ap, am))
        try:
            f = APFunction(terms, alpha)
        except ValidationError:
            continue
        if check_omega_membership(f, alpha) and f.amplitude_sum <= AMPLITUDE_BUDGET:
            return f
    raise ValidationError(f"rejection sampling failed for seed={seed}, index={index}")


def generate_fixtures(seed: int = 1, count: int = 8) -> list[tuple[str, APFunction, dict]]:
    """``(f_id, function, provenance)`` triples, identical for identical arguments."""
    if count < 0:
        raise ValidationError("count must be >= 0")
    out = [(fid, f, {"kind": fid}) for fid, f in _fixed()][:count]
    for j in range(count - len(out)):
        out.append((f"random_{j}", random_function(seed, j),
                    {"kind": "random", "seed": seed, "index": j}))
    return out


def fixture_document(f_id: str, f: APFunction, meta: dict) -> str:
    return json.dumps({"id": f_id, "source": meta, "function": f.to_dict()},
                      indent=2, sort_keys=True) + "\n"


def write_fixtures(out_dir, seed: int = 1, count: int = 8) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for i, (fid, f, meta) in enumerate(generate_fixtures(seed, count)):
        path = os.path.join(out_dir, f"fixture_{i:02d}_{fid}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(fixture_document(fid, f, meta))
        paths.append(path)
    return paths
