"""Backend selection for the hot kernels.

Numba is used when importable unless ``EQUIFRAME_DISABLE_JIT`` is set to a
truthy value, in which case every kernel falls back to its pure-numpy twin.
The flag is read on each call so tests can flip it with ``monkeypatch``.
"""

import os

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


_FALSY = {"", "0", "false", "no", "off"}


def jit_enabled():
    """True when the numba kernels should be used."""
    flag = os.environ.get("EQUIFRAME_DISABLE_JIT", "").strip().lower()
    return HAVE_NUMBA and flag in _FALSY


def backend_name():
    return "numba" if jit_enabled() else "numpy"


def thread_cap():
    """Worker count, capped by ``EQUIFRAME_THREADS`` (default: cpu count)."""
    default = os.cpu_count() or 1
    raw = os.environ.get("EQUIFRAME_THREADS")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(1, value)
