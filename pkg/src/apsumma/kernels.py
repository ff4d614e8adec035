"""Partial-sum kernels and their quadrature.

For ``f`` with alpha-separated exponents the partial sum cut between
``alpha k / 2`` and ``alpha (k + 1) / 2`` is

    S*_k f(x) = f(x) + int_0^inf phi_x(t) Psi_k(t) dt.

Since ``phi_x(t) = 2 sum_nu c_nu (cos(lam_nu t) - 1)`` the integral splits
into real basis integrals ``J_k(lam) = int_0^T (cos(lam t) - 1) Psi_k(t) dt``
that do not depend on ``x``; those are what the hot kernel computes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _hot
from .apfun import APFunction, evaluate, phi_coefficients
from .errors import ValidationError

TAU0 = 1e-6
MAX_REFINEMENTS = 3


@dataclass(frozen=True)
class KernelParams:
    lam: float
    eta: float

    def __post_init__(self):
        if not (0 <= self.lam < self.eta):
            raise ValidationError(f"kernel needs 0 <= lambda < eta, got ({self.lam}, {self.eta})")


@dataclass(frozen=True)
class QuadratureConfig:
    """Truncated panel quadrature for the kernel integrals.

    ``tail_cutoff=None`` selects ``T = max(1e4 / alpha, 1e3 (k + 1) / alpha)``.
    """

    tail_cutoff: float | None = None
    panels_per_oscillation: int = 4
    abs_tolerance: float = 1e-6

    def __post_init__(self):
        if self.tail_cutoff is not None and not self.tail_cutoff > 0:
            raise ValidationError(f"tail_cutoff must be > 0, got {self.tail_cutoff}")
        if int(self.panels_per_oscillation) != self.panels_per_oscillation or self.panels_per_oscillation < 4:
            raise ValidationError(
                f"panels_per_oscillation must be an integer >= 4, got {self.panels_per_oscillation}")
        if not self.abs_tolerance > 0:
            raise ValidationError(f"abs_tolerance must be > 0, got {self.abs_tolerance}")

    def cutoff(self, alpha: float, k: int) -> float:
        if self.tail_cutoff is not None:
            return float(self.tail_cutoff)
        return max(1e4 / alpha, 1e3 * (k + 1) / alpha)

    def to_dict(self) -> dict:
        return {"tail_cutoff": self.tail_cutoff,
                "panels_per_oscillation": self.panels_per_oscillation,
                "abs_tolerance": self.abs_tolerance}

    @classmethod
    def from_dict(cls, d: dict) -> "QuadratureConfig":
        return cls(tail_cutoff=d.get("tail_cutoff"),
                   panels_per_oscillation=int(d.get("panels_per_oscillation", 4)),
                   abs_tolerance=float(d.get("abs_tolerance", 1e-6)))


@dataclass(frozen=True)
class KernelSum:
    value: complex
    tail_bound: float
    error_estimate: float
    converged: bool
    cutoff: float


def psi(params: KernelParams, t, tau0: float = TAU0):
    """Kernel ``Psi_{lam,eta}(t)``; Taylor branch for ``|t| <= tau0``."""
    lam, eta = params.lam, params.eta
    d, s = eta - lam, eta + lam
    ta = np.abs(np.asarray(t, dtype=float))
    safe = np.where(ta > tau0, ta, 1.0)
    direct = 2.0 * np.sin(d * safe / 2.0) * np.sin(s * safe / 2.0) / (math.pi * d * safe * safe)
    taylor = s / (2.0 * math.pi) * (1.0 - (d * d + s * s) * ta * ta / 24.0)
    out = np.where(ta > tau0, direct, taylor)
    return float(out) if out.ndim == 0 else out


def psi_k(alpha: float, k: int, t, tau0: float = TAU0):
    """``Psi_k = Psi_{alpha k/2, alpha (k+1)/2}`` written as in the proofs."""
    if not alpha > 0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    ta = np.abs(np.asarray(t, dtype=float))
    safe = np.where(ta > tau0, ta, 1.0)
    direct = (4.0 * np.sin(alpha * safe / 4.0) * np.sin(alpha * (2 * k + 1) * safe / 4.0)
              / (alpha * math.pi * safe * safe))
    s = alpha * (2 * k + 1) / 2.0
    d = alpha / 2.0
    taylor = s / (2.0 * math.pi) * (1.0 - (d * d + s * s) * ta * ta / 24.0)
    out = np.where(ta > tau0, direct, taylor)
    return float(out) if out.ndim == 0 else out


def _panel_width(lam_max: float, alpha: float, k: int, panels_per_osc: int) -> float:
    # fastest frequency present in (cos(lam t) - 1) * Psi_k(t)
    omega = lam_max + alpha * (k + 1) / 2.0
    return 2.0 * math.pi / (omega * panels_per_osc)


@lru_cache(maxsize=4096)
def _basis_cached(lam: tuple, alpha: float, k: int, T: float, panels_per_osc: int):
    lam_arr = np.array(lam, dtype=float)
    h = _panel_width(max(lam), alpha, k, panels_per_osc)
    fine = _hot.kernel_basis(lam_arr, alpha, k, T, h, _hot.GL_NODES, _hot.GL_WEIGHTS)
    coarse = _hot.kernel_basis(lam_arr, alpha, k, T, 2.0 * h, _hot.GL_NODES, _hot.GL_WEIGHTS)
    fine.setflags(write=False)
    return fine, np.abs(fine - coarse)


def kernel_basis_integrals(lam, alpha: float, k: int, T: float, panels_per_osc: int = 4):
    """``J_k(lam) = int_0^T (cos(lam t) - 1) Psi_k(t) dt`` and a refinement error estimate."""
    return _basis_cached(tuple(float(v) for v in lam), float(alpha), int(k), float(T),
                         int(panels_per_osc))


def kernel_partial_sum(f: APFunction, x: float, k: int,
                       cfg: QuadratureConfig | None = None) -> KernelSum:
    """``f(x) + int_0^T phi_x(t) Psi_k(t) dt`` with tail bound and convergence flag.

    The tail bound is ``8 sup|phi_x| / (alpha pi T)`` with
    ``sup|phi_x| <= 4 sum |c_nu|``. Panels are refined up to three times when
    the fine/coarse difference exceeds ``cfg.abs_tolerance``.
    """
    if cfg is None:
        cfg = QuadratureConfig()
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    alpha = f.alpha
    T = cfg.cutoff(alpha, k)
    c = phi_coefficients(f, x)[1:]
    lam = f.lam[1:]
    fx = evaluate(f, x)
    sup_phi = 4.0 * float(np.sum(np.abs(c)))
    tail = 8.0 * sup_phi / (alpha * math.pi * T)
    if lam.size == 0:
        return KernelSum(fx, tail, 0.0, True, T)
    ppo = cfg.panels_per_oscillation
    for _ in range(MAX_REFINEMENTS + 1):
        J, err = kernel_basis_integrals(lam, alpha, k, T, ppo)
        est = float(np.sum(2.0 * np.abs(c) * err))
        if est <= cfg.abs_tolerance:
            break
        ppo *= 2
    value = fx + complex(np.sum(2.0 * c * J))
    return KernelSum(value, tail, est, est <= cfg.abs_tolerance, T)


def kappa_index(f: APFunction, k: int):
    """Index of the exponent strictly inside ``(alpha k/2, alpha (k+1)/2)``, or ``None``.

    Decided by exact comparison on the stored exponents.
    """
    lo = f.alpha * k / 2.0
    hi = f.alpha * (k + 1) / 2.0
    hits = np.nonzero((f.lam > lo) & (f.lam < hi))[0]
    return int(hits[0]) if hits.size else None


def kernel_threshold_sum(f: APFunction, x: float, k: int,
                         cfg: QuadratureConfig | None = None) -> KernelSum:
    """Kernel route to ``S_{alpha k/2} f(x)`` with the kappa shift applied.

    When an exponent ``lam_nu`` lies strictly inside ``(alpha k/2, alpha (k+1)/2)``
    the sum is ``S*_{k+1} f(x)`` minus that exponent's two terms; otherwise it is
    ``S*_k f(x)``.
    """
    nu = kappa_index(f, k)
    if nu is None:
        return kernel_partial_sum(f, x, k, cfg)
    ks = kernel_partial_sum(f, x, k + 1, cfg)
    term = f.ap[nu] * np.exp(1j * f.lam[nu] * x) + f.am[nu] * np.exp(-1j * f.lam[nu] * x)
    return KernelSum(ks.value - complex(term), ks.tail_bound, ks.error_estimate,
                     ks.converged, ks.cutoff)


def _check_r(r: float):
    if not (0.0 <= r < 1.0):
        raise ValidationError(f"r must satisfy 0 <= r < 1, got {r}")


def geometric_sine_sum_closed(r: float, y: float, z: float) -> float:
    """Closed form of ``sum_{k>=0} r^k sin(y(2k+1)/2) sin(z(2k+1)/2)``."""
    _check_r(r)
    num = (math.sin(y / 2.0) * math.sin(z / 2.0) * (1.0 - r)
           * ((1.0 + r) ** 2 + 2.0 * r * (math.cos(y) + math.cos(z))))
    den = (((1.0 - r) ** 2 + 4.0 * r * math.sin((y + z) / 2.0) ** 2)
           * ((1.0 - r) ** 2 + 4.0 * r * math.sin((y - z) / 2.0) ** 2))
    if den < 1e-30:
        raise ValidationError(f"denominator {den} too small at r={r}, y={y}, z={z}")
    return num / den


def geometric_sine_sum_direct(r: float, y: float, z: float, N: int) -> float:
    """First ``N`` terms of the series; truncation error at most ``r**N / (1 - r)``."""
    _check_r(r)
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    k = np.arange(N)
    terms = r ** k * np.sin(y * (2 * k + 1) / 2.0) * np.sin(z * (2 * k + 1) / 2.0)
    return math.fsum(terms.tolist())
