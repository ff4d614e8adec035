"""Numba implementations of the hot kernels.

Every function here has a twin with the same signature in ``_hot_numpy``;
the two are checked against each other in the test suite.
"""
import numpy as np
from numba import njit

# exact re-seeding of the panel rotations every this many panels
_RESYNC = 512


@njit(cache=True, nogil=True)
def trig_eval(lam, ap, am, x):
    out = np.empty(x.shape[0], dtype=np.complex128)
    m = lam.shape[0]
    for j in range(x.shape[0]):
        acc = 0.0 + 0.0j
        for i in range(m):
            c = np.cos(lam[i] * x[j])
            s = np.sin(lam[i] * x[j])
            acc += ap[i] * complex(c, s) + am[i] * complex(c, -s)
        out[j] = acc
    return out


@njit(cache=True, nogil=True)
def abs_power_integrals(lam, ap, am, lo, hi, p, max_panel, xs, ws):
    nint = lo.shape[0]
    m = lam.shape[0]
    nn = xs.shape[0]
    out = np.zeros(nint)
    for q in range(nint):
        length = hi[q] - lo[q]
        if length <= 0.0:
            continue
        npan = int(np.ceil(length / max_panel))
        if npan < 1:
            npan = 1
        h = length / npan
        acc = 0.0
        for pidx in range(npan):
            a = lo[q] + pidx * h
            for j in range(nn):
                t = a + 0.5 * h * (xs[j] + 1.0)
                v = 0.0 + 0.0j
                for i in range(m):
                    c = np.cos(lam[i] * t)
                    s = np.sin(lam[i] * t)
                    v += ap[i] * complex(c, s) + am[i] * complex(c, -s)
                mag = abs(v)
                if p == 1.0:
                    acc += 0.5 * h * ws[j] * mag
                elif p == 2.0:
                    acc += 0.5 * h * ws[j] * mag * mag
                else:
                    acc += 0.5 * h * ws[j] * mag**p
        out[q] = acc
    return out


@njit(cache=True, nogil=True)
def kernel_basis(lam, alpha, k, T, h, xs, ws):
    """Integrals of (cos(lam t) - 1) * Psi_k(t) over [0, T], one per lam."""
    m = lam.shape[0]
    nn = xs.shape[0]
    npan = int(np.ceil(T / h))
    if npan < 1:
        npan = 1
    h = T / npan
    a = alpha * k / 2.0
    b = alpha * (k + 1) / 2.0
    c0 = 2.0 / (alpha * np.pi)
    out = np.zeros(m)
    off = 0.5 * h * (xs + 1.0)
    wt = 0.5 * h * ws

    rot_a = np.exp(1j * a * h)
    rot_b = np.exp(1j * b * h)
    rot_l = np.exp(1j * lam * h)
    ea_off = np.exp(1j * a * off)
    eb_off = np.exp(1j * b * off)
    el_off = np.empty((m, nn), dtype=np.complex128)
    for i in range(m):
        for j in range(nn):
            el_off[i, j] = np.exp(1j * lam[i] * off[j])

    pa = 1.0 + 0.0j
    pb = 1.0 + 0.0j
    pl = np.ones(m, dtype=np.complex128)
    for pidx in range(npan):
        base = pidx * h
        if pidx % _RESYNC == 0:
            pa = np.exp(1j * a * base)
            pb = np.exp(1j * b * base)
            for i in range(m):
                pl[i] = np.exp(1j * lam[i] * base)
        for j in range(nn):
            t = base + off[j]
            if pidx == 0:
                # cancellation-free form near the removable singularity
                psi = (4.0 * np.sin(alpha * t / 4.0) * np.sin(alpha * (2 * k + 1) * t / 4.0)
                       / (alpha * np.pi * t * t)) * wt[j]
                for i in range(m):
                    s = np.sin(0.5 * lam[i] * t)
                    out[i] -= 2.0 * s * s * psi
            else:
                ca = (pa * ea_off[j]).real
                cb = (pb * eb_off[j]).real
                psi = c0 * (ca - cb) / (t * t) * wt[j]
                for i in range(m):
                    out[i] += ((pl[i] * el_off[i, j]).real - 1.0) * psi
        pa *= rot_a
        pb *= rot_b
        for i in range(m):
            pl[i] *= rot_l[i]
    return out
