"""Approximation measures: moduli of continuity, pointwise moduli built on
``phi_x``, the fitted modulus ``w_x`` and best-approximation brackets.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _hot
from .apfun import (APFunction, _stepanov_arrays, default_u_grid, panel_width,
                    phi_coefficients, phi_trig)
from .errors import ValidationError

FLOOR_TOL = 1e-12


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class ModulusFunction:
    """Piecewise-linear function through ``(0, 0)`` and ``(grid[i], values[i])``.

    Beyond the last grid point it continues as ``values[-1] * delta / grid[-1]``;
    for a concave grid function this keeps ``w(delta) / delta`` nonincreasing and
    hence ``w`` subadditive.
    """

    grid: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size == 0:
            raise ValidationError("grid and values must be nonempty and of equal length")
        if np.any(g <= 0) or np.any(np.diff(g) <= 0):
            raise ValidationError("grid must be positive and strictly increasing")
        if np.any(v < 0) or np.any(np.diff(v) < 0):
            raise ValidationError("values must be nonnegative and nondecreasing")
        object.__setattr__(self, "grid", tuple(float(x) for x in g))
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    def __call__(self, delta):
        g = np.asarray(self.grid)
        v = np.asarray(self.values)
        d = np.asarray(delta, dtype=float)
        if np.any(d < 0):
            raise ValidationError("modulus argument must be >= 0")
        inside = np.interp(d, np.concatenate(([0.0], g)), np.concatenate(([0.0], v)))
        out = np.where(d > g[-1], v[-1] * d / g[-1], inside)
        return float(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "ModulusFunction":
        return ModulusFunction(self.grid, tuple(factor * v for v in self.values))

    def is_subadditive(self, rtol: float = 1e-12) -> bool:
        """Check ``w(a + b) <= w(a) + w(b)`` on all grid pairs whose sum is on the grid."""
        g = np.asarray(self.grid)
        v = np.asarray(self.values)
        lookup = {x: y for x, y in zip(self.grid, self.values)}
        for i in range(g.size):
            for j in range(i, g.size):
                s = self.grid[i] + self.grid[j]
                if s in lookup and lookup[s] > (v[i] + v[j]) * (1 + rtol) + 1e-300:
                    return False
        return True

    def to_dict(self) -> dict:
        return {"grid": list(self.grid), "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "ModulusFunction":
        return cls(tuple(d["grid"]), tuple(d["values"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class ApproxBracket:
    lower: float
    upper: float
    sigma: float


# ---------------------------------------------------------------- helpers

def _integrals(lam, ap, am, lo, hi, p, lam_max):
    return _hot.abs_power_integrals(
        lam, np.ascontiguousarray(ap), np.ascontiguousarray(am),
        np.ascontiguousarray(lo, dtype=float), np.ascontiguousarray(hi, dtype=float),
        float(p), panel_width(lam_max), _hot.GL_NODES, _hot.GL_WEIGHTS)


def _shift(lam, ap, am, t):
    """Coefficients of ``g(. + t) - g(.)``."""
    return ap * (np.exp(1j * lam * t) - 1.0), am * (np.exp(-1j * lam * t) - 1.0)


def _check_p(p):
    if not (p == math.inf or p >= 1):
        raise ValidationError(f"p must be >= 1 or inf, got {p}")


def default_t_step(f: APFunction) -> float:
    return math.pi / (64.0 * max(f.lam_max, 1.0))


# ---------------------------------------------------------------- omega

def shift_norms(f: APFunction, ts, p: float, u_grid=None) -> np.ndarray:
    """``||f(. + t) - f||_{S^p}`` for every ``t`` in ``ts``."""
    _check_p(p)
    u_grid = default_u_grid(f) if u_grid is None else np.asarray(u_grid, dtype=float)
    return np.array([_stepanov_arrays(f.lam, *_shift(f.lam, f.ap, f.am, t), p, u_grid, f.lam_max)
                     for t in ts])


def omega_curve(f: APFunction, deltas, p: float, t_step: float | None = None,
                u_grid=None) -> np.ndarray:
    """``omega f(delta)_{S^p}`` for each delta, using shifts ``t = +-j t_step``.

    The shift set for ``delta`` is ``{j t_step : j t_step <= delta}`` on both
    sides, so shift sets are nested and the result is nondecreasing in delta.
    Below ``t_step`` the subadditivity lower bound
    ``omega(t_step) / ceil(t_step / delta)`` is returned.
    """
    deltas = np.asarray(deltas, dtype=float)
    if np.any(deltas < 0):
        raise ValidationError("delta must be >= 0")
    h = default_t_step(f) if t_step is None else float(t_step)
    if deltas.size == 0:
        return deltas
    return omega_lookup(omega_running(f, deltas.max(), p, h, u_grid), h, deltas)


def omega_running(f: APFunction, delta_max: float, p: float, h: float, u_grid=None) -> np.ndarray:
    """Running max of ``||f(. +- j h) - f||_{S^p}`` for ``j h <= delta_max``."""
    jmax = int(math.floor(delta_max / h * (1 + FLOOR_TOL)))
    ts = h * np.arange(1, jmax + 1)
    if ts.size == 0:
        return np.zeros(0)
    u_grid = default_u_grid(f) if u_grid is None else np.asarray(u_grid, dtype=float)
    if p == math.inf:
        vals = _sup_shift_norms(f, h, jmax, u_grid)
    elif p == 2:
        vals = np.maximum(_l2_shift_norms(f, ts, u_grid), _l2_shift_norms(f, -ts, u_grid))
    else:
        vals = np.maximum(shift_norms(f, ts, p, u_grid), shift_norms(f, -ts, p, u_grid))
    return np.maximum.accumulate(vals)


def _sup_shift_norms(f: APFunction, h: float, jmax: int, u_grid) -> np.ndarray:
    # f sampled once with spacing h covering every window; shifts are index offsets
    lo, hi = float(u_grid.min()), float(u_grid.max()) + math.pi
    npts = int(math.ceil((hi - lo) / h)) + 1
    xs = lo + h * np.arange(-jmax, npts + jmax)
    vals = _hot.trig_eval(f.lam, f.ap, f.am, xs)
    core = vals[jmax: jmax + npts]
    out = np.empty(jmax)
    for j in range(1, jmax + 1):
        fwd = np.abs(vals[jmax + j: jmax + j + npts] - core).max()
        back = np.abs(vals[jmax - j: jmax - j + npts] - core).max()
        out[j - 1] = max(fwd, back)
    return out


def _l2_shift_norms(f: APFunction, ts, u_grid) -> np.ndarray:
    # exact window means of |f(. + t) - f|^2 from the Gram form
    mu = np.concatenate((f.lam, -f.lam))
    b = np.concatenate((f.ap, f.am))
    om = mu[:, None] - mu[None, :]
    mean = (np.exp(1j * om[None] * (u_grid[:, None, None] + math.pi / 2.0))
            * np.sinc(om / 2.0)[None])
    bt = b[None, :] * (np.exp(1j * mu[None, :] * np.asarray(ts)[:, None]) - 1.0)
    sq = np.einsum("ti,tj,uij->tu", bt, np.conj(bt), mean, optimize=True).real
    return np.sqrt(np.maximum(sq.max(axis=1), 0.0))


def omega_lookup(running: np.ndarray, h: float, deltas) -> np.ndarray:
    """Evaluate the nested-shift modulus from a precomputed running max."""
    deltas = np.asarray(deltas, dtype=float)
    if running.size == 0:
        return np.zeros_like(deltas)
    idx = np.floor(deltas / h * (1 + FLOOR_TOL)).astype(int)
    if np.any(idx > running.size):
        raise ValidationError("delta beyond the precomputed shift range")
    with np.errstate(divide="ignore"):
        small = running[0] / np.ceil(h / np.where(deltas > 0, deltas, 0.0))
    return np.where(idx >= 1, running[np.maximum(idx, 1) - 1], np.where(deltas > 0, small, 0.0))


def omega_modulus(f: APFunction, delta: float, p: float, t_step: float | None = None,
                  u_grid=None) -> float:
    """Modulus of continuity in ``S^p`` at ``delta`` (see :func:`omega_curve`)."""
    _check_p(p)
    if delta < 0:
        raise ValidationError(f"delta must be >= 0, got {delta}")
    return float(omega_curve(f, [delta], p, t_step, u_grid)[0])


# ---------------------------------------------------------------- phi-based moduli

def w_x_modulus(f: APFunction, x: float, delta: float, p: float = 1.0) -> float:
    """``{(1/delta) int_0^delta |phi_x|^p}^{1/p}``."""
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    if not p >= 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    lam, ap, am = phi_trig(f, x)
    v = _integrals(lam, ap, am, [0.0], [delta], p, f.lam_max)[0]
    return float((v / delta) ** (1.0 / p))


def G_x_blocks(f: APFunction, x: float, delta: float, p: float = 1.0) -> np.ndarray:
    """Block averages ``(1/((k+1) delta)) int_{k delta}^{(k+1) delta} |phi_x|^p``."""
    nblocks = int(math.floor(math.pi / (f.alpha * delta) + FLOOR_TOL)) + 1
    lo = delta * np.arange(nblocks)
    lam, ap, am = phi_trig(f, x)
    ints = _integrals(lam, ap, am, lo, lo + delta, p, f.lam_max)
    return ints / (delta * np.arange(1, nblocks + 1))


def G_x_modulus(f: APFunction, x: float, delta: float, s: float = 2.0, p: float = 1.0) -> float:
    """``{sum_{k=0}^{[pi/(alpha delta)]} (block_k)^{s/p}}^{1/s}``."""
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    if not s > 1:
        raise ValidationError(f"s must be > 1, got {s}")
    if not p >= 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    b = G_x_blocks(f, x, delta, p)
    if b.size == 1:
        return float(b[0] ** (1.0 / p))
    return float(np.sum(b ** (s / p)) ** (1.0 / s))


def phi_mean(f: APFunction, x: float, delta: float, nu: float) -> complex:
    """``(1/delta) int_nu^{nu+delta} phi_x(u) du`` in closed form."""
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    c = phi_coefficients(f, x)
    lam = f.lam
    # (1/delta) int cos(lam u) du = cos(lam (nu + delta/2)) * sinc(lam delta / 2)
    mean_cos = np.cos(lam * (nu + delta / 2.0)) * np.sinc(lam * delta / (2.0 * math.pi))
    return complex(np.sum(2.0 * c * (mean_cos - 1.0)))


def shifted_difference_means(f: APFunction, x: float, gamma: float, deltas,
                             sign: int = 1) -> np.ndarray:
    """``(1/delta) int_0^delta |phi_x(t) - phi_x(t + sign gamma)| dt`` for each delta."""
    deltas = np.asarray(deltas, dtype=float)
    order = np.argsort(deltas)
    edges = np.concatenate(([0.0], deltas[order]))
    lam, ap, am = phi_trig(f, x)
    bp, bm = _shift(lam, ap, am, sign * gamma)
    pieces = _integrals(lam, -bp, -bm, edges[:-1], edges[1:], 1.0, f.lam_max)
    out = np.empty_like(deltas)
    out[order] = np.cumsum(pieces) / deltas[order]
    return out


def estimate_w_violations(f: APFunction, x: float, w: "ModulusFunction", grid=None,
                          rtol: float = 1e-9) -> list[tuple[float, float, float, float]]:
    """Grid pairs where ``|Phi_x f(z1, z2)| > (w(z1) + w(z2)) (1 + rtol)``.

    ``z1`` is the window length and ``z2`` the window start. Each entry is
    ``(z1, z2, |Phi|, w(z1) + w(z2))``; an empty list means the estimate holds.
    """
    grid = np.asarray(w.grid if grid is None else grid, dtype=float)
    out = []
    for z1 in grid:
        for z2 in grid:
            lhs = abs(phi_mean(f, x, float(z1), float(z2)))
            rhs = float(w(z1) + w(z2))
            if lhs > rhs * (1.0 + rtol) + 1e-300:
                out.append((float(z1), float(z2), lhs, rhs))
    return out


# ---------------------------------------------------------------- fitted modulus

def default_delta_grid(points: int = 48, lo: float = math.pi / 1024, hi: float = math.pi) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def raw_modulus_measurements(f: APFunction, x: float, delta_grid) -> tuple[np.ndarray, np.ndarray]:
    """Per grid point: max shifted-difference mean over deltas and signs, and ``G_x(.)_{2,1}``."""
    grid = np.asarray(delta_grid, dtype=float)
    shifted = np.array([max(shifted_difference_means(f, x, g, grid, +1).max(),
                            shifted_difference_means(f, x, g, grid, -1).max()) for g in grid])
    gx = np.array([G_x_modulus(f, x, d, 2.0, 1.0) for d in grid])
    return shifted, gx


def least_concave_majorant(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Values at ``xs`` of the least concave majorant of ``(0, 0), (xs, ys)``."""
    px = np.concatenate(([0.0], xs))
    py = np.concatenate(([0.0], ys))
    hull = [0]
    for i in range(1, px.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or below the chord a -> i
            cross = (px[b] - px[a]) * (py[i] - py[a]) - (py[b] - py[a]) * (px[i] - px[a])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(xs, px[hull], py[hull])


def fit_modulus(f: APFunction, x: float, delta_grid=None) -> ModulusFunction:
    """Smallest concave (hence subadditive) grid function dominating both measurements."""
    grid = default_delta_grid() if delta_grid is None else np.asarray(delta_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValidationError("delta_grid must be positive and strictly increasing")
    shifted, gx = raw_modulus_measurements(f, x, grid)
    raw = np.maximum.accumulate(np.maximum(shifted, gx))
    w = np.maximum(least_concave_majorant(grid, raw), raw)
    return ModulusFunction(tuple(grid), tuple(np.maximum.accumulate(w)))


@dataclass(frozen=True)
class MembershipRow:
    kind: str
    gamma_or_delta: float
    lhs: float
    w_value: float

    @property
    def ratio(self) -> float:
        if self.w_value == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.w_value


def omega_alpha_membership_report(f: APFunction, x: float, w: ModulusFunction,
                                  gamma_grid=None, delta_grid=None) -> list[MembershipRow]:
    """Ratios of the class-defining quantities (p=1, s=2) to ``w``.

    Shifted rows report the max over deltas and both signs for each gamma.
    """
    gamma_grid = np.asarray(w.grid if gamma_grid is None else gamma_grid, dtype=float)
    delta_grid = np.asarray(w.grid if delta_grid is None else delta_grid, dtype=float)
    if np.any(gamma_grid <= 0) or np.any(delta_grid <= 0):
        raise ValidationError("grids must be positive")
    rows = []
    for g in gamma_grid:
        lhs = max(shifted_difference_means(f, x, g, delta_grid, +1).max(),
                  shifted_difference_means(f, x, g, delta_grid, -1).max())
        rows.append(MembershipRow("shifted", float(g), float(lhs), float(w(g))))
    for d in delta_grid:
        rows.append(MembershipRow("G_x", float(d), G_x_modulus(f, x, d, 2.0, 1.0), float(w(d))))
    return rows


def membership_diagnostic(rows: list[MembershipRow]) -> float:
    return max((r.ratio for r in rows), default=0.0)


# ---------------------------------------------------------------- best approximation

def best_approx_bracket(f: APFunction, sigma: float) -> ApproxBracket:
    """Rigorous bracket for ``E_sigma(f)_{S^1}``.

    Upper: drop every exponent above ``sigma`` (each exponential has unit
    ``S^1`` norm). Lower: the largest dropped coefficient, since a coefficient
    at an exponent above ``sigma`` is bounded by the Weyl norm of ``f - g``.
    """
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    dropped = f.lam > sigma
    if not np.any(dropped):
        return ApproxBracket(0.0, 0.0, float(sigma))
    ap = np.abs(f.ap[dropped])
    am = np.abs(f.am[dropped])
    return ApproxBracket(float(np.max(np.maximum(ap, am))), float(np.sum(ap + am)), float(sigma))


def bracket_curve(f: APFunction, sigmas) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized lower and upper bracket ends for an array of sigmas."""
    sigmas = np.asarray(sigmas, dtype=float)
    lam = f.lam[1:]
    ap = np.abs(f.ap[1:])
    am = np.abs(f.am[1:])
    mask = lam[None, :] > sigmas[:, None]
    lower = np.max(np.where(mask, np.maximum(ap, am)[None, :], 0.0), axis=1, initial=0.0)
    upper = np.sum(np.where(mask, (ap + am)[None, :], 0.0), axis=1)
    return lower, upper
