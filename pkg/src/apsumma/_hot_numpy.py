"""Pure-numpy twins of the kernels in ``_hot_numba``."""
import numpy as np

# nodes processed per vectorized chunk
_CHUNK = 1 << 18


def trig_eval(lam, ap, am, x):
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[0], dtype=np.complex128)
    for s in range(0, x.shape[0], _CHUNK):
        ph = np.outer(x[s:s + _CHUNK], lam)
        c, sn = np.cos(ph), np.sin(ph)
        out[s:s + _CHUNK] = (c + 1j * sn) @ ap + (c - 1j * sn) @ am
    return out


def abs_power_integrals(lam, ap, am, lo, hi, p, max_panel, xs, ws):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    out = np.zeros(lo.shape[0])
    for q in range(lo.shape[0]):
        length = hi[q] - lo[q]
        if length <= 0.0:
            continue
        npan = max(1, int(np.ceil(length / max_panel)))
        h = length / npan
        starts = lo[q] + h * np.arange(npan)
        t = (starts[:, None] + 0.5 * h * (xs + 1.0)[None, :]).ravel()
        mag = np.abs(trig_eval(lam, ap, am, t)) ** p
        out[q] = np.sum(mag.reshape(npan, -1) @ (0.5 * h * ws))
    return out


def kernel_basis(lam, alpha, k, T, h, xs, ws):
    npan = max(1, int(np.ceil(T / h)))
    h = T / npan
    off = 0.5 * h * (xs + 1.0)
    wt = 0.5 * h * ws
    a = alpha * k / 2.0
    b = alpha * (k + 1) / 2.0
    out = np.zeros(lam.shape[0])
    # first panel in the cancellation-free form
    t = off
    psi = 4.0 * np.sin(alpha * t / 4.0) * np.sin(alpha * (2 * k + 1) * t / 4.0) / (alpha * np.pi * t * t)
    out -= (2.0 * np.sin(0.5 * np.outer(lam, t)) ** 2) @ (psi * wt)
    step = max(1, _CHUNK // xs.shape[0])
    for s in range(1, npan, step):
        e = min(npan, s + step)
        t = (h * np.arange(s, e)[:, None] + off[None, :]).ravel()
        w = np.tile(wt, e - s)
        psi = 2.0 * (np.cos(a * t) - np.cos(b * t)) / (alpha * np.pi * t * t) * w
        out += (np.cos(np.outer(lam, t)) - 1.0) @ psi
    return out
