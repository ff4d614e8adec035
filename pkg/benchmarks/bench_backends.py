"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_backends.py [--repeat 5] [--end-to-end]

Micro benchmarks call both backend modules directly. ``--end-to-end`` also
times a ``kernel-check`` run in subprocesses with and without
``APSUMMA_DISABLE_NUMBA``.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from apsumma import _hot_numpy
from apsumma._accel import HAVE_NUMBA

GL_X, GL_W = np.polynomial.legendre.leggauss(8)


def workloads():
    rng = np.random.default_rng(0)
    lam = np.concatenate(([0.0], np.cumsum(1.0 + rng.random(9))))
    ap = rng.normal(size=10) + 1j * rng.normal(size=10)
    am = np.concatenate(([0], rng.normal(size=9) + 1j * rng.normal(size=9)))
    x = np.linspace(-100, 100, 200_000)
    lo = np.linspace(0, 50, 64)
    return {
        "trig_eval[200k pts]": lambda m: m.trig_eval(lam, ap, am, x),
        "abs_power_integrals[64 windows]": lambda m: m.abs_power_integrals(
            lam, ap, am, lo, lo + np.pi, 1.0, 0.05, GL_X, GL_W),
        "kernel_basis[T=1e4,k=32]": lambda m: m.kernel_basis(lam[1:], 1.0, 32, 1e4, 0.05, GL_X, GL_W),
    }


def best_of(fn, repeat):
    fn()  # warm-up (numba compiles here)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def end_to_end():
    cmd = [sys.executable, "-m", "apsumma", "kernel-check", "--fixture", "random_0",
           "--k-max", "16", "--x-points", "5"]
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, APSUMMA_DISABLE_NUMBA=flag)
        t0 = time.perf_counter()
        subprocess.run(cmd, env=env, check=True, capture_output=True)
        print(f"  kernel-check end-to-end [{label}]: {time.perf_counter() - t0:.2f}s")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)
    backends = {"numpy": _hot_numpy}
    if HAVE_NUMBA:
        from apsumma import _hot_numba
        backends["numba"] = _hot_numba
    else:
        print("numba not installed; numpy backend only")
    print(f"{'workload':36s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in workloads().items():
        t = {b: best_of(lambda: fn(m), args.repeat) for b, m in backends.items()}
        speed = f"{t['numpy'] / t['numba']:10.1f}x" if "numba" in t else ""
        print(f"{name:36s}" + "".join(f"{v * 1e3:10.2f}ms" for v in t.values()) + speed)
    if args.end_to_end:
        end_to_end()


if __name__ == "__main__":
    main()
