"""Threshold partial sums and strong means of their deviations.

Deviations ``d_k = |S_{alpha k/2} f(x) - f(x)|`` vanish identically once
``alpha k / 2 >= lam_max``, so every strong mean below is an exact finite sum
even for rows of infinite support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .apfun import APFunction
from .errors import ValidationError
from .summability import MatrixRow, check_row_stochastic


@dataclass(frozen=True)
class DeviationSequence:
    values: np.ndarray
    k_stop: int

    def __getitem__(self, k):
        return self.values[k] if k < self.values.shape[0] else 0.0


def _term_values(f: APFunction, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ph = np.outer(x, f.lam)
    return f.ap * np.exp(1j * ph) + f.am * np.exp(-1j * ph)


def threshold_partial_sum(f: APFunction, x, gamma: float):
    """Sum of the terms with ``lam_nu <= gamma`` (both signs)."""
    vals = _term_values(f, x)[:, f.lam <= gamma]
    out = vals.sum(axis=1)
    return complex(out[0]) if np.ndim(x) == 0 else out


def k_stop(f: APFunction, alpha: float) -> int:
    """Smallest ``k`` with ``alpha k / 2 >= lam_max``."""
    k = int(math.ceil(2.0 * f.lam_max / alpha))
    while k > 0 and alpha * (k - 1) / 2.0 >= f.lam_max:
        k -= 1
    while alpha * k / 2.0 < f.lam_max:
        k += 1
    return k


def deviation_matrix(f: APFunction, xs, alpha: float, k_max: int) -> np.ndarray:
    """``d[i, k] = |S_{alpha k/2} f(xs[i]) - f(xs[i])|`` for ``k = 0..k_max``."""
    vals = _term_values(f, xs)
    cum = np.cumsum(vals, axis=1)
    full = cum[:, -1:]
    counts = np.searchsorted(f.lam, alpha * np.arange(k_max + 1) / 2.0, side="right")
    # counts >= 1 because lam_0 = 0
    return np.abs(cum[:, counts - 1] - full)


def deviation_sequence(f: APFunction, x: float, alpha: float | None = None,
                       k_max: int | None = None) -> DeviationSequence:
    alpha = f.alpha if alpha is None else float(alpha)
    ks = k_stop(f, alpha)
    if k_max is None:
        k_max = ks
    if k_max < math.ceil(2.0 * f.lam_max / alpha):
        raise ValidationError(f"k_max={k_max} is below ceil(2 lam_max / alpha)")
    d = deviation_matrix(f, [x], alpha, k_max)[0]
    return DeviationSequence(d, ks)


def _check_q(q):
    if not q > 0:
        raise ValidationError(f"q must be > 0, got {q}")


def strong_mean(f: APFunction, x: float, row: MatrixRow, q: float,
                alpha: float | None = None) -> float:
    """``{sum_k a_{n,k} d_k^q}^{1/q}``, exact for finite trigonometric sums."""
    _check_q(q)
    if not check_row_stochastic(row):
        raise ValidationError(f"row {row.to_dict()} is not row-stochastic")
    dev = deviation_sequence(f, x, alpha)
    a = row.entries(dev.k_stop)
    return float(np.sum(a * dev.values[: dev.k_stop + 1] ** q) ** (1.0 / q))


def strong_mean_grid(f: APFunction, xs, row: MatrixRow, q: float,
                     alpha: float | None = None) -> np.ndarray:
    """:func:`strong_mean` for every point of ``xs``."""
    _check_q(q)
    alpha = f.alpha if alpha is None else float(alpha)
    ks = k_stop(f, alpha)
    d = deviation_matrix(f, xs, alpha, ks)
    return np.sum(row.entries(ks)[None, :] * d ** q, axis=1) ** (1.0 / q)


def block_strong_mean(f: APFunction, x: float, n: int, q: float,
                      alpha: float | None = None) -> float:
    """``{(1/(n+1)) sum_{k=n}^{2n} d_k^q}^{1/q}``."""
    _check_q(q)
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    alpha = f.alpha if alpha is None else float(alpha)
    ks = k_stop(f, alpha)
    d = deviation_matrix(f, [x], alpha, max(ks, 2 * n))[0]
    return float((np.sum(d[n: 2 * n + 1] ** q) / (n + 1)) ** (1.0 / q))
