"""Backend selection for the hot numeric kernels.

Numba is used when importable unless ``APSUMMA_DISABLE_NUMBA`` is set to a
truthy value, in which case the pure-numpy implementations are used.
"""
import os

_FALSY = ("", "0", "false", "no", "off")


def _env_disabled():
    return os.environ.get("APSUMMA_DISABLE_NUMBA", "").strip().lower() not in _FALSY


try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
