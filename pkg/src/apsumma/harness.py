"""Left and right sides of the approximation inequalities, as ratio reports.

Each inequality ``LHS << RHS`` is reported as ``LHS / RHS`` where the
best-approximation terms of the right side use the lower end of their
bracket (the strongest test); the upper end is kept as a sanity column.
"Non-divergence" compares the largest ratio over the upper half of an
``n`` range with the largest ratio over the lower half.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .apfun import APFunction, default_u_grid, quasi_period, stepanov_norm
from .errors import ValidationError
from .moduli import (ModulusFunction, bracket_curve, default_t_step, fit_modulus, omega_curve,
                     omega_lookup, omega_running)
from .strong_means import block_strong_mean, deviation_matrix, k_stop, strong_mean_grid
from .summability import MatrixRow, generate_row, gm2beta_constant, ms_check

INEQUALITIES = ("prop4", "thm5", "thm6", "thm3", "thm2", "remark7")
CSV_COLUMNS = ("inequality_id", "f_id", "x", "n", "q", "c", "row_family",
               "lhs", "rhs_lower", "rhs_upper", "ratio", "flags")
TAIL_MASS_TOL = 1e-12
NONDIVERGENCE_FACTOR = 3.0


def safe_ratio(lhs: float, rhs: float) -> float:
    """``lhs / rhs`` with ``0/0 -> nan`` (undefined) and ``x/0 -> inf``."""
    if rhs == 0:
        return math.nan if lhs == 0 else math.inf
    return lhs / rhs


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "undefined"
        return repr(v)
    return str(v)


@dataclass
class RatioReport:
    inequality_id: str
    f_id: str
    x: float | None
    n: int
    q: float
    lhs: float
    rhs_lower: float
    rhs_upper: float
    c: float | None = None
    row_family: str = ""
    flags: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lhs < 0:
            raise ValidationError(f"lhs must be >= 0, got {self.lhs}")
        if self.rhs_lower > self.rhs_upper * (1 + 1e-12) + 1e-300:
            raise ValidationError(f"rhs_lower {self.rhs_lower} exceeds rhs_upper {self.rhs_upper}")

    @property
    def ratio(self) -> float:
        return safe_ratio(self.lhs, self.rhs_lower)

    @property
    def ratio_upper(self) -> float:
        return safe_ratio(self.lhs, self.rhs_upper)

    def csv_row(self) -> list[str]:
        return [self.inequality_id, self.f_id, fmt(self.x), str(self.n), fmt(float(self.q)),
                fmt(None if self.c is None else float(self.c)), self.row_family,
                fmt(float(self.lhs)), fmt(float(self.rhs_lower)), fmt(float(self.rhs_upper)),
                fmt(float(self.ratio)), ";".join(self.flags)]


# ---------------------------------------------------------------- grids

def default_x_grid(f: APFunction, count: int = 17) -> np.ndarray:
    """``count`` points over one quasi-period (``2 pi / alpha`` when incommensurate)."""
    period = quasi_period(f)
    if period is None or period > 200.0 * math.pi:
        period = 2.0 * math.pi / f.alpha if f.lam_max > 0 else 2.0 * math.pi
    return np.linspace(0.0, period, count, endpoint=False)


def _check_q_le_2(q):
    if not 0 < q <= 2:
        raise ValidationError(f"q must satisfy 0 < q <= 2, got {q}")


# ---------------------------------------------------------------- prop4: block means

def prop4_ratio(f: APFunction, x: float, n: int, q: float, w: ModulusFunction,
                f_id: str = "f") -> RatioReport:
    """Block mean of deviations over ``k = n..2n`` against ``w(pi/(n+1)) + E_{alpha n/2}``."""
    _check_q_le_2(q)
    lhs = block_strong_mean(f, x, n, q)
    wv = float(w(math.pi / (n + 1)))
    lo, up = bracket_curve(f, [f.alpha * n / 2.0])
    return RatioReport("prop4", f_id, x, n, q, lhs, wv + float(lo[0]), wv + float(up[0]))


def prop4_table(f: APFunction, x: float, ns, q: float, w: ModulusFunction,
                f_id: str = "f") -> list[RatioReport]:
    """:func:`prop4_ratio` for many ``n`` sharing one deviation sequence."""
    _check_q_le_2(q)
    ns = np.asarray(ns, dtype=int)
    d = deviation_matrix(f, [x], f.alpha, max(k_stop(f, f.alpha), 2 * int(ns.max())))[0] ** q
    prefix = np.concatenate(([0.0], np.cumsum(d)))
    wv = w(math.pi / (ns + 1.0))
    lo, up = bracket_curve(f, f.alpha * ns / 2.0)
    out = []
    for i, n in enumerate(ns):
        s = prefix[2 * n + 1] - prefix[n]
        # exact zero in the reproduction regime (all deviations vanish)
        lhs = 0.0 if not np.any(d[n: 2 * n + 1]) else float((s / (n + 1)) ** (1.0 / q))
        out.append(RatioReport("prop4", f_id, x, int(n), q, lhs,
                               float(wv[i] + lo[i]), float(wv[i] + up[i])))
    return out


# ---------------------------------------------------------------- thm5, thm6: matrix means

def _truncation_index(row: MatrixRow, w: ModulusFunction, q: float, k_min: int):
    """Index ``K`` past which the right side's remaining mass is below ``1e-12``."""
    end = row.support_end
    if end is not None:
        return end, 0.0
    K = max(k_min, 16)
    while True:
        bound = row.tail_mass(K) * float(w(math.pi / (K + 1))) ** q
        if bound < TAIL_MASS_TOL:
            return K, bound
        K *= 2


class RhsTerms:
    """``w(pi/(k+1)) + E_{alpha k / e_divisor}`` at both bracket ends, grown on demand.

    The curves depend on ``(f, w, e_divisor)`` only, so one instance serves
    every row and every ``n`` of a sweep cell.
    """

    def __init__(self, f: APFunction, w: ModulusFunction, e_divisor: float):
        self.f, self.w, self.e_divisor = f, w, float(e_divisor)
        self.lower = np.zeros(0)
        self.upper = np.zeros(0)

    def __call__(self, K: int):
        if self.lower.size <= K:
            size = max(K + 1, 2 * self.lower.size)
            k = np.arange(size)
            wv = self.w(math.pi / (k + 1.0))
            lo, up = bracket_curve(self.f, self.f.alpha * k / self.e_divisor)
            self.lower, self.upper = wv + lo, wv + up
        return self.lower[: K + 1], self.upper[: K + 1]


def _matrix_rhs(f: APFunction, row: MatrixRow, q: float, w: ModulusFunction, e_divisor: float,
                terms: RhsTerms | None = None):
    """``{sum_k a_k [w(pi/(k+1)) + E_{alpha k / e_divisor}]^q}^{1/q}`` at both bracket ends."""
    k_e = int(math.ceil(f.lam_max * e_divisor / f.alpha)) + 1
    K, bound = _truncation_index(row, w, q, max(k_e, k_stop(f, f.alpha)))
    a = row.entries(K)
    lo, up = (terms or RhsTerms(f, w, e_divisor))(K)
    rl = float(np.sum(a * lo ** q) ** (1.0 / q))
    ru = float(np.sum(a * up ** q) ** (1.0 / q))
    return rl, ru, {"truncation_K": int(K), "truncation_bound": bound}


def thm5_ratio(f: APFunction, x: float, n: int, q: float, row: MatrixRow, c: float,
               w: ModulusFunction, f_id: str = "f", class_check: bool = True,
               terms: RhsTerms | None = None) -> RatioReport:
    """Strong mean against the GM(2beta) bound with ``E_{alpha k / 2^{1+[c]}}``."""
    _check_q_le_2(q)
    if not c > 1:
        raise ValidationError(f"c must be > 1, got {c}")
    flags = []
    if class_check and not gm2beta_constant(row, c).member:
        flags.append("row_not_gm2beta")
    lhs = float(strong_mean_grid(f, [x], row, q)[0])
    rl, ru, meta = _matrix_rhs(f, row, q, w, 2.0 ** (1 + math.floor(c)), terms)
    meta["e_divisor"] = 2.0 ** (1 + math.floor(c))
    return RatioReport("thm5", f_id, x, n, q, lhs, rl, ru, c, row.family, tuple(flags), meta)


def thm6_ratio(f: APFunction, x: float, n: int, q: float, row: MatrixRow,
               w: ModulusFunction, f_id: str = "f", terms: RhsTerms | None = None) -> RatioReport:
    """Strong mean against the MS-row bound with ``E_{alpha k / 2}``."""
    _check_q_le_2(q)
    if not ms_check(row).member:
        raise ValidationError(f"row {row.to_dict()} is not in MS")
    lhs = float(strong_mean_grid(f, [x], row, q)[0])
    rl, ru, meta = _matrix_rhs(f, row, q, w, 2.0, terms)
    return RatioReport("thm6", f_id, x, n, q, lhs, rl, ru, None, row.family, (), meta)


# ---------------------------------------------------------------- thm3, thm2: uniform and S^p norms

@dataclass
class OmegaCache:
    """Modulus of continuity of one function; the shift curve is computed once up to pi."""

    f: APFunction
    p: float
    u_grid: np.ndarray | None = None
    t_step: float | None = None
    _running: np.ndarray | None = None

    def __call__(self, deltas) -> np.ndarray:
        deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
        h = default_t_step(self.f) if self.t_step is None else self.t_step
        if deltas.size and deltas.max() > math.pi * (1 + 1e-12):
            return omega_curve(self.f, deltas, self.p, h, self.u_grid)
        if self._running is None:
            self._running = omega_running(self.f, math.pi, self.p, h, self.u_grid)
        return omega_lookup(self._running, h, deltas)


def thm3_comparison(f: APFunction, n: int, q: float, x_grid=None, omega_inf: OmegaCache | None = None,
                    f_id: str = "f", norm_inf: float | None = None) -> RatioReport:
    """Sup over the x-grid of the Cesaro strong mean against the uniform-norm bound."""
    if not q >= 2:
        raise ValidationError(f"q must be >= 2, got {q}")
    xs = default_x_grid(f) if x_grid is None else np.asarray(x_grid, dtype=float)
    lhs = float(np.max(strong_mean_grid(f, xs, generate_row("cesaro", n), q)))
    rhs = thm3_rhs(f, n, q, omega_inf, norm_inf)
    return RatioReport("thm3", f_id, None, n, q, lhs, rhs, rhs, None, "cesaro")


def thm3_rhs(f: APFunction, n: int, q: float, omega_inf: OmegaCache | None = None,
             norm_inf: float | None = None) -> float:
    omega_inf = OmegaCache(f, math.inf) if omega_inf is None else omega_inf
    if norm_inf is None:
        norm_inf = stepanov_norm(f, math.inf)
    om = omega_inf(math.pi / (np.arange(n + 1) + 1.0))
    return float(np.mean(om ** q) ** (1.0 / q) + norm_inf / (n + 1) ** (1.0 / q))


def stepanov_nodes(u_grid, lam_max: float):
    """Gauss-Legendre nodes of every window ``[u, u + pi]`` and the shared weights."""
    from ._hot import GL_NODES, GL_WEIGHTS
    from .apfun import panel_width
    u_grid = np.asarray(u_grid, dtype=float)
    npan = max(1, int(math.ceil(math.pi / panel_width(lam_max))))
    h = math.pi / npan
    offs = (h * np.arange(npan)[:, None] + 0.5 * h * (GL_NODES + 1.0)[None, :]).ravel()
    wts = np.tile(0.5 * h * GL_WEIGHTS, npan)
    return (u_grid[:, None] + offs[None, :]).ravel(), wts


def _window_norm(vals: np.ndarray, n_windows: int, wts: np.ndarray, p: float) -> float:
    vals = np.abs(vals).reshape(n_windows, -1)
    if p == math.inf:
        return float(vals.max())
    return float(np.max((vals ** p) @ wts / math.pi) ** (1.0 / p))


def stepanov_norm_of_samples(fn, u_grid, lam_max: float, p: float) -> float:
    """``S^p`` norm of a sampled real function ``fn(xs)`` over windows ``[u, u + pi]``."""
    nodes, wts = stepanov_nodes(u_grid, lam_max)
    return _window_norm(fn(nodes), np.size(u_grid), wts, p)


def _thm2_rhs(f, row, q, omega_p):
    end = row.support_end
    if end is None:
        K = max(16, k_stop(f, f.alpha))
        while row.tail_mass(K) * 2.0 ** q * max(f.amplitude_sum, 1.0) ** q >= TAIL_MASS_TOL:
            K *= 2
    else:
        K = end
    om = omega_p(math.pi / (np.arange(K + 1) + 1.0))
    return float(np.sum(row.entries(K) * om ** q) ** (1.0 / q)), K


def thm2_norm_ratio(f: APFunction, n: int, q: float, row: MatrixRow, c: float = 2.0,
                    p: float = 2.0, u_grid=None, omega_p: OmegaCache | None = None,
                    f_id: str = "f") -> RatioReport:
    """``||H^q_n f||_{S^p}`` against ``{sum_k a_k omega^q(pi/(k+1))_{S^p}}^{1/q}``."""
    if not (p >= q and p > 1):
        raise ValidationError(f"need p >= q and p > 1, got p={p}, q={q}")
    flags = [] if gm2beta_constant(row, c).member else ["row_not_gm2beta"]
    if u_grid is None:
        u_grid = default_u_grid(f, 32)
    lhs = stepanov_norm_of_samples(lambda xs: strong_mean_grid(f, xs, row, q), u_grid,
                                   f.lam_max, p)
    omega_p = OmegaCache(f, p, u_grid) if omega_p is None else omega_p
    rhs, K = _thm2_rhs(f, row, q, omega_p)
    return RatioReport("thm2", f_id, None, n, q, lhs, rhs, rhs, c, row.family, tuple(flags),
                       {"p": p, "truncation_K": int(K)})


def thm2_table(f: APFunction, rows, q: float, c: float = 2.0, p: float = 2.0, u_grid=None,
               omega_p: OmegaCache | None = None, f_id: str = "f", member=None) -> list[RatioReport]:
    """:func:`thm2_norm_ratio` for a sequence of ``(n, row)`` pairs sharing one node set.

    ``member(n)`` may supply precomputed GM(2beta) membership.
    """
    if not (p >= q and p > 1):
        raise ValidationError(f"need p >= q and p > 1, got p={p}, q={q}")
    if u_grid is None:
        u_grid = default_u_grid(f, 32)
    omega_p = OmegaCache(f, p, u_grid) if omega_p is None else omega_p
    nodes, wts = stepanov_nodes(u_grid, f.lam_max)
    ks = k_stop(f, f.alpha)
    dq = deviation_matrix(f, nodes, f.alpha, ks) ** q
    out = []
    for n, row in rows:
        ok = gm2beta_constant(row, c).member if member is None else member(n)
        lhs = _window_norm((dq @ row.entries(ks)) ** (1.0 / q), np.size(u_grid), wts, p)
        rhs, K = _thm2_rhs(f, row, q, omega_p)
        out.append(RatioReport("thm2", f_id, None, n, q, lhs, rhs, rhs, c, row.family,
                               () if ok else ("row_not_gm2beta",), {"p": p, "truncation_K": int(K)}))
    return out


# ---------------------------------------------------------------- remark7: MS vs uniform bound

def remark7_ratio(f: APFunction, n: int, ws: dict, omega_inf: OmegaCache | None = None,
                  f_id: str = "f", norm_inf: float | None = None) -> RatioReport:
    """``max_x rhs(thm6)(x) / rhs(thm3)`` for ``q = 2`` and the Cesaro row ``n``.

    ``ws`` maps each grid point ``x`` to its fitted modulus.
    """
    row = generate_row("cesaro", n)
    rhs6 = max(_matrix_rhs(f, row, 2.0, w, 2.0)[0] for w in ws.values())
    rhs3 = thm3_rhs(f, n, 2.0, omega_inf, norm_inf)
    return RatioReport("remark7", f_id, None, n, 2.0, rhs6, rhs3, rhs3, None, "cesaro")


def jackson_constants(f: APFunction, sigmas, t_step: float | None = None) -> np.ndarray:
    """``upper(sigma) / omega f(1/sigma)_{S^1}`` over a sigma grid (nan where both vanish)."""
    sigmas = np.asarray(sigmas, dtype=float)
    _, up = bracket_curve(f, sigmas)
    om = omega_curve(f, 1.0 / sigmas, 1.0, t_step)
    return np.array([safe_ratio(u, o) for u, o in zip(up, om)])


# ---------------------------------------------------------------- non-divergence

def nondivergence(ns, ratios, n_split: int):
    """``(upper_max, lower_max)`` over ``n >= n_split`` and ``n <= n_split``.

    Undefined (0/0) ratios are ignored; an empty half counts as 0.
    """
    ns = np.asarray(ns)
    r = np.asarray(ratios, dtype=float)
    ok = ~np.isnan(r)

    def half(mask):
        sel = r[mask & ok]
        return float(sel.max()) if sel.size else 0.0

    return half(ns >= n_split), half(ns <= n_split)


def nondivergence_pass(upper: float, lower: float, factor: float = NONDIVERGENCE_FACTOR) -> bool:
    if math.isinf(upper):
        return False
    return upper <= factor * lower or upper == 0.0


def fitted_moduli(f: APFunction, xs, delta_grid=None) -> dict:
    return {float(x): fit_modulus(f, float(x), delta_grid) for x in xs}
