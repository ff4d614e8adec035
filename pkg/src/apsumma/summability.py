"""Rows of summability matrices and the classes MS, RBVS, GM and GM(2beta).

A row is either an explicit finite list of weights or one of the generator
families ``cesaro``, ``riesz`` (weights ``(k+1)**s``) and ``abel``
(``(1 - r) r**k``, infinite support). Class constants are the smallest ``K``
that makes the defining inequality hold for every ``1 <= m <= m_max``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

STOCHASTIC_TOL = 1e-12
GENERATOR_M_MAX = 1 << 14
FAMILIES = ("explicit", "cesaro", "riesz", "abel")
CLASS_NAMES = ("MS", "RBVS", "GM", "GM2BETA")


@dataclass(frozen=True)
class MatrixRow:
    family: str
    n: int
    params: tuple = ()
    explicit: tuple | None = None
    _finite: np.ndarray | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown row family {self.family!r}; expected one of {FAMILIES}")
        if int(self.n) != self.n or self.n < 0:
            raise ValidationError(f"row index n must be a nonnegative integer, got {self.n}")
        p = self.param_dict
        if self.family == "explicit":
            if not self.explicit:
                raise ValidationError("explicit row needs a nonempty entry list")
            arr = np.array(self.explicit, dtype=float)
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise ValidationError("explicit row entries must be finite and >= 0")
            object.__setattr__(self, "_finite", arr)
        elif self.family == "cesaro":
            object.__setattr__(self, "_finite", np.full(self.n + 1, 1.0 / (self.n + 1)))
        elif self.family == "riesz":
            w = np.arange(1, self.n + 2, dtype=float) ** float(p.get("s", 1.0))
            object.__setattr__(self, "_finite", w / math.fsum(w.tolist()))
        else:
            r = self.r
            if not (0.0 <= r < 1.0):
                raise ValidationError(f"abel parameter r must satisfy 0 <= r < 1, got {r}")
            if r == 0.0:
                object.__setattr__(self, "_finite", np.array([1.0]))

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def r(self) -> float:
        return float(self.param_dict.get("r", 1.0 - 1.0 / (self.n + 1)))

    @property
    def support_end(self):
        """Last index with a possibly nonzero entry, ``None`` for infinite support."""
        return None if self._finite is None else int(self._finite.shape[0] - 1)

    def entries(self, k_end: int) -> np.ndarray:
        """``a_{n,0}, ..., a_{n,k_end}``."""
        k_end = int(k_end)
        if self._finite is not None:
            out = np.zeros(k_end + 1)
            m = min(k_end + 1, self._finite.shape[0])
            out[:m] = self._finite[:m]
            return out
        r = self.r
        return (1.0 - r) * r ** np.arange(k_end + 1, dtype=float)

    def tail_mass(self, K: int) -> float:
        """``sum_{k > K} a_{n,k}``."""
        if self._finite is not None:
            return math.fsum(self._finite[K + 1:].tolist())
        return self.r ** (K + 1)

    def tail_variation(self, E: int) -> float:
        """``sum_{k >= E} |a_k - a_{k+1}|`` (closed form for the abel tail)."""
        if self._finite is not None:
            a = self.entries(max(E, self.support_end) + 1)[E:]
            return float(np.sum(np.abs(np.diff(a))))
        return (1.0 - self.r) * self.r ** E

    def to_dict(self) -> dict:
        if self.family == "explicit":
            return {"explicit": list(self.explicit), "n": self.n}
        return {"family": self.family, "n": self.n, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "MatrixRow":
        if "explicit" in d:
            return cls("explicit", int(d.get("n", 0)), (), tuple(float(v) for v in d["explicit"]))
        if "family" not in d:
            raise ValidationError("row spec needs 'family' or 'explicit'")
        return generate_row(d["family"], int(d.get("n", 0)), **d.get("params", {}))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def explicit_row(entries, n: int = 0) -> MatrixRow:
    return MatrixRow("explicit", n, (), tuple(float(v) for v in entries))


def generate_row(family: str, n: int, **params) -> MatrixRow:
    """Row ``n`` of a named family: ``cesaro``, ``riesz(s=1)``, ``abel(r=1-1/(n+1))``."""
    if family not in FAMILIES or family == "explicit":
        raise ValidationError(f"unknown row family {family!r}")
    allowed = {"cesaro": set(), "riesz": {"s"}, "abel": {"r"}}[family]
    extra = set(params) - allowed
    if extra:
        raise ValidationError(f"unexpected parameters for {family}: {sorted(extra)}")
    return MatrixRow(family, n, tuple(sorted((k, float(v)) for k, v in params.items())))


@dataclass(frozen=True)
class ClassReport:
    class_name: str
    member: bool
    K: float | None
    witness_m: int | None
    m_max: int

    def csv_fields(self, n: int) -> list:
        return [n, self.class_name, int(self.member),
                "" if self.K is None else repr(self.K),
                "" if self.witness_m is None else self.witness_m]


def check_row_stochastic(row: MatrixRow) -> bool:
    """Row sums to 1 within ``1e-12`` (closed form for the abel family)."""
    if row._finite is None:
        return 0.0 <= row.r < 1.0
    return abs(math.fsum(row._finite.tolist()) - 1.0) <= STOCHASTIC_TOL


def default_m_max(row: MatrixRow) -> int:
    end = row.support_end
    return GENERATOR_M_MAX if end is None else max(1, 2 * end)


def ms_check(row: MatrixRow) -> ClassReport:
    """Nonincreasing check; members report ``K = 0`` (no increase found)."""
    end = row.support_end
    if end is None:
        return ClassReport("MS", True, 0.0, None, 0)
    a = row.entries(end + 1)
    bad = np.nonzero(a[1:] > a[:-1])[0]
    if bad.size:
        return ClassReport("MS", False, None, int(bad[0]), end)
    return ClassReport("MS", True, 0.0, None, end)


def _ratio_report(name, num, den, ms, m_max):
    # num, den indexed by the m values in ms; 0/0 is skipped
    fail = np.nonzero((den == 0) & (num > 0))[0]
    if fail.size:
        return ClassReport(name, False, None, int(ms[fail[0]]), m_max)
    ok = den > 0
    if not np.any(ok):
        return ClassReport(name, True, 0.0, None, m_max)
    ratios = np.where(ok, num / np.where(ok, den, 1.0), -np.inf)
    i = int(np.argmax(ratios))
    return ClassReport(name, True, float(ratios[i]), int(ms[i]), m_max)


def _diffs(row: MatrixRow, k_end: int) -> tuple[np.ndarray, np.ndarray]:
    a = row.entries(k_end + 1)
    return a, np.abs(np.diff(a))


def rbvs_constant(row: MatrixRow, m_max: int | None = None, m_min: int = 1) -> ClassReport:
    """Smallest ``K`` with ``sum_{k>=m} |a_k - a_{k+1}| <= K a_m`` for ``m_min <= m <= m_max``."""
    m_max = default_m_max(row) if m_max is None else int(m_max)
    if m_max < 1:
        raise ValidationError("m_max must be >= 1")
    a, d = _diffs(row, m_max)
    rest = np.cumsum(d[::-1])[::-1] + row.tail_variation(m_max + 1)
    ms = np.arange(m_min, m_max + 1)
    return _ratio_report("RBVS", rest[ms], a[ms], ms, m_max)


def range_sums(v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """``sum(v[lo:hi])`` for nonnegative ``v`` and each index pair.

    Each sum is a difference of prefix sums or of suffix sums, whichever has the
    smaller operands, so rapidly decaying or growing rows keep full relative
    precision.
    """
    prefix = np.concatenate(([0.0], np.cumsum(v)))
    suffix = np.concatenate((np.cumsum(v[::-1])[::-1], [0.0]))
    by_prefix = prefix[hi] - prefix[lo]
    by_suffix = suffix[lo] - suffix[hi]
    return np.where(prefix[hi] <= suffix[lo], by_prefix, by_suffix)


def _block_variation(d: np.ndarray, ms: np.ndarray) -> np.ndarray:
    return range_sums(d, ms, 2 * ms)


def gm_constant(row: MatrixRow, m_max: int | None = None, m_min: int = 1) -> ClassReport:
    """Smallest ``K`` with ``sum_{k=m}^{2m-1} |a_k - a_{k+1}| <= K a_m``."""
    m_max = default_m_max(row) if m_max is None else int(m_max)
    if m_max < 1:
        raise ValidationError("m_max must be >= 1")
    a, d = _diffs(row, 2 * m_max)
    ms = np.arange(m_min, m_max + 1)
    return _ratio_report("GM", _block_variation(d, ms), a[ms], ms, m_max)


def beta2_sums(a: np.ndarray, ms: np.ndarray, c: float) -> np.ndarray:
    """``sum_{k=max(1,[m/c])}^{[c m]} a_k / k`` for each ``m``."""
    k = np.arange(a.shape[0], dtype=float)
    w = np.where(k > 0, a / np.where(k > 0, k, 1.0), 0.0)
    lo = np.maximum(1, np.floor(ms / c).astype(int))
    hi = np.floor(c * ms).astype(int)
    return range_sums(w, lo, hi + 1)


def gm2beta_constant(row: MatrixRow, c: float, m_max: int | None = None) -> ClassReport:
    """Smallest ``K`` with block variation ``<= K sum_{k=[m/c]}^{[cm]} a_k / k``."""
    if not c > 1:
        raise ValidationError(f"c must be > 1, got {c}")
    m_max = default_m_max(row) if m_max is None else int(m_max)
    if m_max < 1:
        raise ValidationError("m_max must be >= 1")
    k_end = max(2 * m_max, int(math.floor(c * m_max)))
    a, d = _diffs(row, k_end)
    ms = np.arange(1, m_max + 1)
    return _ratio_report(f"GM2BETA({c:g})", _block_variation(d, ms), beta2_sums(a, ms, c), ms, m_max)


def gm_beta_sum_constant(row: MatrixRow, c: float, m_max: int | None = None) -> ClassReport:
    """Constant for the sequence ``|a_m| + 2beta_m``; membership agrees with GM(2beta)."""
    if not c > 1:
        raise ValidationError(f"c must be > 1, got {c}")
    m_max = default_m_max(row) if m_max is None else int(m_max)
    k_end = max(2 * m_max, int(math.floor(c * m_max)))
    a, d = _diffs(row, k_end)
    ms = np.arange(1, m_max + 1)
    return _ratio_report("GM1BETA+2BETA", _block_variation(d, ms),
                         a[ms] + beta2_sums(a, ms, c), ms, m_max)


class HierarchyViolation(RuntimeError):
    pass


def hierarchy_check(row: MatrixRow, c: float = 2.0, m_max: int | None = None) -> list[ClassReport]:
    """All four reports; raises :class:`HierarchyViolation` if MS => RBVS => GM => GM(2beta) breaks."""
    reports = [ms_check(row), rbvs_constant(row, m_max), gm_constant(row, m_max),
               gm2beta_constant(row, c, m_max)]
    ms, rbvs, gm, gm2 = reports
    if ms.member and not (rbvs.member and rbvs.K <= 1.0 + 1e-9):
        raise HierarchyViolation(f"MS row with RBVS report {rbvs}")
    if ms.member and not (gm.member and gm.K <= 1.0 + 1e-9):
        raise HierarchyViolation(f"MS row with GM report {gm}")
    if rbvs.member and not gm.member:
        raise HierarchyViolation(f"RBVS row outside GM: {gm}")
    if gm.member and not gm2.member:
        raise HierarchyViolation(f"GM row outside GM(2beta): {gm2}")
    return reports


def family_constants(family: str, n_values, c: float = 2.0, m_max: int | None = None,
                     **params) -> list[tuple[int, list[ClassReport]]]:
    """Hierarchy reports for rows ``n`` of one family, in order."""
    return [(n, hierarchy_check(generate_row(family, n, **params), c, m_max)) for n in n_values]
