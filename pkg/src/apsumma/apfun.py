"""Almost periodic functions modelled as finite trigonometric sums.

A function is stored as exponents ``0 = lam_0 < lam_1 < ...`` with a pair of
complex amplitudes per exponent, so that

    f(x) = sum_nu a_plus[nu] * exp(i lam_nu x) + a_minus[nu] * exp(-i lam_nu x).

Everything else in the package works from the three arrays ``lam``, ``ap``,
``am`` exposed by :class:`APFunction`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import _hot
from .errors import ValidationError

# relative slack for the exponent gap test, so that 0.3 - 0.2 >= 0.1 holds
GAP_RTOL = 1e-12
DEFAULT_U_POINTS = 256


class Term(NamedTuple):
    lam: float
    a_plus: complex
    a_minus: complex = 0j


class EvalPoint(NamedTuple):
    x: float
    value: complex


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValidationError(f"complex amplitude must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


@dataclass(frozen=True)
class APFunction:
    """Finite trigonometric sum with alpha-separated nonnegative exponents.

    If the smallest listed exponent is positive, a zero-amplitude term at
    ``lam = 0`` is prepended, so ``terms[0].lam == 0`` always holds.
    """

    terms: tuple[Term, ...]
    alpha: float
    lam: np.ndarray = field(init=False, repr=False, compare=False)
    ap: np.ndarray = field(init=False, repr=False, compare=False)
    am: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple(Term(float(t[0]), complex(t[1]), complex(t[2]) if len(t) > 2 else 0j)
                      for t in self.terms)
        alpha = float(self.alpha)
        if not (math.isfinite(alpha) and alpha > 0):
            raise ValidationError(f"alpha must be a positive finite number, got {alpha}")
        if not terms:
            raise ValidationError("at least one term is required")
        for i, t in enumerate(terms):
            if not math.isfinite(t.lam) or t.lam < 0:
                raise ValidationError(f"terms[{i}].lambda must be finite and >= 0, got {t.lam}")
            for name, a in (("a_plus", t.a_plus), ("a_minus", t.a_minus)):
                if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                    raise ValidationError(f"terms[{i}].{name} is not finite")
        if terms[0].lam > 0:
            terms = (Term(0.0, 0j, 0j),) + terms
        for i in range(1, len(terms)):
            if not terms[i].lam > terms[i - 1].lam:
                raise ValidationError(
                    f"exponents must be strictly increasing: terms[{i}].lambda={terms[i].lam} "
                    f"after {terms[i - 1].lam}")
        for i in range(1, len(terms)):
            gap = terms[i].lam - terms[i - 1].lam
            if gap < alpha * (1.0 - GAP_RTOL):
                raise ValidationError(
                    f"exponent gap {gap} between lambda={terms[i - 1].lam} and "
                    f"lambda={terms[i].lam} is smaller than alpha={alpha}")
        if terms[0].a_minus != 0:
            raise ValidationError("a_minus at lambda=0 must be 0 (the constant term is a_plus)")
        for i in range(1, len(terms)):
            if abs(terms[i].a_plus) + abs(terms[i].a_minus) == 0:
                raise ValidationError(f"terms[{i}] has |a_plus| + |a_minus| = 0")

        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "alpha", alpha)
        for name, arr in (("lam", np.array([t.lam for t in terms], dtype=float)),
                          ("ap", np.array([t.a_plus for t in terms], dtype=complex)),
                          ("am", np.array([t.a_minus for t in terms], dtype=complex))):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_terms(cls, terms: Sequence, alpha: float) -> "APFunction":
        return cls(tuple(Term(*t) for t in terms), alpha)

    @property
    def lam_max(self) -> float:
        return float(self.lam[-1])

    @property
    def amplitude_sum(self) -> float:
        """``sum(|a_plus| + |a_minus|)``, a bound for ``|f|`` everywhere."""
        return float(np.sum(np.abs(self.ap)) + np.sum(np.abs(self.am)))

    def __call__(self, x):
        return evaluate(self, x)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "terms": [{"lambda": t.lam,
                       "a_plus": [t.a_plus.real, t.a_plus.imag],
                       "a_minus": [t.a_minus.real, t.a_minus.imag]} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "APFunction":
        if not isinstance(d, dict):
            raise ValidationError("function spec must be a JSON object")
        if "alpha" not in d:
            raise ValidationError("missing field 'alpha'")
        if not isinstance(d.get("terms"), list):
            raise ValidationError("field 'terms' must be a list")
        terms = []
        for i, t in enumerate(d["terms"]):
            if not isinstance(t, dict) or "lambda" not in t:
                raise ValidationError(f"terms[{i}] must be an object with a 'lambda' field")
            terms.append(Term(float(t["lambda"]),
                              _as_complex(t.get("a_plus", 0)),
                              _as_complex(t.get("a_minus", 0))))
        return cls(tuple(terms), d["alpha"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "APFunction":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)


def load(path) -> APFunction:
    with open(path, encoding="utf-8") as fh:
        return APFunction.from_json(fh.read())


def dump(f: APFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(f.to_dict(), indent=2, sort_keys=True))
        fh.write("\n")


def _eval(lam, ap, am, x):
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = _hot.trig_eval(lam, ap, am, np.ascontiguousarray(xa.ravel())).reshape(xa.shape)
    if np.ndim(x) == 0:
        return complex(out[0])
    return out


def evaluate(f: APFunction, x):
    """Value of ``f`` at ``x`` (scalar or array)."""
    return _eval(f.lam, f.ap, f.am, x)


def sample(f: APFunction, xs) -> list[EvalPoint]:
    vals = np.atleast_1d(evaluate(f, np.asarray(xs, dtype=float)))
    return [EvalPoint(float(x), complex(v)) for x, v in zip(np.atleast_1d(xs), vals)]


def phi_coefficients(f: APFunction, x: float) -> np.ndarray:
    """Weights ``c_nu`` with ``phi_x(t) = 2 sum c_nu (cos(lam_nu t) - 1)``."""
    return f.ap * np.exp(1j * f.lam * x) + f.am * np.exp(-1j * f.lam * x)


def phi_trig(f: APFunction, x: float):
    """``phi_x`` as trigonometric-sum arrays ``(lam, ap, am)`` in ``t``."""
    c = phi_coefficients(f, x)
    c[0] = 0.0
    ap = c.copy()
    am = c.copy()
    ap[0] = -2.0 * np.sum(c)
    am[0] = 0.0
    return f.lam, ap, am


def phi(f: APFunction, x: float, t):
    """Symmetric second difference ``f(x+t) + f(x-t) - 2 f(x)``."""
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    return evaluate(f, x + t) + evaluate(f, x - t) - 2.0 * evaluate(f, x)


def exact_coefficient(f: APFunction, lam: float) -> complex:
    """Bohr-Fourier coefficient at the signed exponent ``lam`` (exact match only)."""
    if lam == 0:
        return complex(f.ap[0]) if f.lam[0] == 0 else 0j
    idx = np.nonzero(f.lam == abs(lam))[0]
    if idx.size == 0:
        return 0j
    return complex(f.ap[idx[0]] if lam > 0 else f.am[idx[0]])


def _mean_exp(omega, L):
    # (1/L) int_0^L exp(i omega t) dt, stable as omega*L -> 0
    theta = omega * L
    return np.exp(0.5j * theta) * np.sinc(theta / (2.0 * np.pi))


def bohr_coefficient(f: APFunction, lam: float, L: float) -> complex:
    """Finite-``L`` Bohr mean ``(1/L) int_0^L f(t) exp(-i lam t) dt`` in closed form."""
    if not L > 0:
        raise ValidationError(f"L must be > 0, got {L}")
    plus = f.ap * _mean_exp(f.lam - lam, L)
    minus = f.am * _mean_exp(-f.lam - lam, L)
    return complex(np.sum(plus) + np.sum(minus))


def bohr_error_envelope(f: APFunction, lam: float, L: float, points: int = 4001) -> float:
    """``max_{L <= L' <= 2L} |bohr_coefficient(f, lam, L') - exact_coefficient(f, lam)|``.

    The pointwise error oscillates in ``L`` and touches zero; its envelope over
    a dyadic block decays like ``1/L``.
    """
    if not L > 0:
        raise ValidationError(f"L must be > 0, got {L}")
    Ls = np.linspace(L, 2.0 * L, points)
    plus = f.ap[None, :] * _mean_exp((f.lam - lam)[None, :], Ls[:, None])
    minus = f.am[None, :] * _mean_exp((-f.lam - lam)[None, :], Ls[:, None])
    err = plus.sum(axis=1) + minus.sum(axis=1) - exact_coefficient(f, lam)
    return float(np.max(np.abs(err)))


def quasi_period(f: APFunction, max_den: int = 64, rtol: float = 1e-9):
    """Common period ``2 pi / g`` when all positive exponents are multiples of some ``g``.

    Returns ``None`` for incommensurate spectra or constants.
    """
    pos = [float(v) for v in f.lam if v > 0]
    if not pos:
        return None
    base = pos[0]
    fracs = []
    for v in pos:
        fr = Fraction(v / base).limit_denominator(max_den)
        if abs(float(fr) - v / base) > rtol * max(1.0, v / base):
            return None
        fracs.append(fr)
    den = 1
    for fr in fracs:
        den = den * fr.denominator // math.gcd(den, fr.denominator)
    nums = [int(fr * den) for fr in fracs]
    g = 0
    for v in nums:
        g = math.gcd(g, v)
    return 2.0 * math.pi * den / (base * g)


def default_u_grid(f: APFunction, points: int = DEFAULT_U_POINTS) -> np.ndarray:
    """Window starts for Stepanov sups: one common period if it exists, else ``[0, 100 pi)``."""
    period = quasi_period(f)
    span = period if period is not None and period <= 200.0 * math.pi else 100.0 * math.pi
    return np.linspace(0.0, span, points, endpoint=False)


def panel_width(lam_max: float) -> float:
    return math.pi / (8.0 * max(lam_max, 1.0))


def window_means(lam, ap, am, starts, p: float, width: float = math.pi, lam_max=None):
    """``(1/width) int_u^{u+width} |g|^p`` for every start ``u`` (``g`` given as arrays)."""
    starts = np.ascontiguousarray(np.asarray(starts, dtype=float))
    if lam_max is None:
        lam_max = float(np.max(lam)) if len(lam) else 0.0
    ints = _hot.abs_power_integrals(lam, np.ascontiguousarray(ap), np.ascontiguousarray(am),
                                    starts, starts + width, float(p), panel_width(lam_max),
                                    _hot.GL_NODES, _hot.GL_WEIGHTS)
    return ints / width


def window_l2_means(lam, ap, am, starts, width: float = math.pi) -> np.ndarray:
    """Exact ``(1/width) int_u^{u+width} |g|^2`` for every start, via the Gram form."""
    mu = np.concatenate((lam, -np.asarray(lam)))
    b = np.concatenate((ap, am))
    om = mu[:, None] - mu[None, :]
    starts = np.asarray(starts, dtype=float)
    mean = (np.exp(1j * om[None] * (starts[:, None, None] + width / 2.0))
            * np.sinc(om * width / (2.0 * math.pi))[None])
    return np.einsum("i,j,uij->u", b, np.conj(b), mean).real


def sup_grid(starts, lam_max: float, width: float = math.pi) -> np.ndarray:
    """Dense sample points covering every window ``[u, u + width]``."""
    per_window = int(max(64, math.ceil(16.0 * max(lam_max, 1.0) * width / math.pi)))
    offs = np.linspace(0.0, width, per_window + 1)
    return np.unique((np.asarray(starts, dtype=float)[:, None] + offs[None, :]).ravel())


def _stepanov_arrays(lam, ap, am, p, u_grid, lam_max):
    if p == math.inf:
        return float(np.max(np.abs(_eval(lam, ap, am, sup_grid(u_grid, lam_max)))))
    if p == 2:
        return float(max(np.max(window_l2_means(lam, ap, am, u_grid)), 0.0) ** 0.5)
    return float(np.max(window_means(lam, ap, am, u_grid, p, lam_max=lam_max)) ** (1.0 / p))


def stepanov_norm(f: APFunction, p: float, u_grid=None) -> float:
    """Stepanov ``S^p`` norm with the sup over window starts taken on ``u_grid``.

    Windows have length ``pi``; integrals use 8-point Gauss-Legendre panels of
    width at most ``pi / (8 lam_max)``. For ``p = inf`` the sup of ``|f|`` is
    taken over :func:`sup_grid`. Both are lower estimates of the true norm.
    """
    if not (p == math.inf or p >= 1):
        raise ValidationError(f"p must be >= 1 or inf, got {p}")
    if u_grid is None:
        u_grid = default_u_grid(f)
    u_grid = np.atleast_1d(np.asarray(u_grid, dtype=float))
    if u_grid.size == 0:
        raise ValidationError("u_grid must be nonempty")
    return _stepanov_arrays(f.lam, f.ap, f.am, p, u_grid, f.lam_max)


def check_omega_membership(f: APFunction, alpha: float) -> bool:
    """True iff every consecutive exponent gap is at least ``alpha``."""
    if not alpha > 0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    gaps = np.diff(f.lam)
    return bool(np.all(gaps >= alpha * (1.0 - GAP_RTOL)))
