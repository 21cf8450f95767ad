"""Kernel backend selection.

The range-count and pair-join kernels exist twice: numba-compiled loops and a
vectorized pure-numpy path. Numba is used when it imports cleanly unless the
environment variable ``MCCATCH_DISABLE_NUMBA`` is set to a truthy value.
"""
from __future__ import annotations

import os
import warnings
from contextlib import contextmanager

# numba probes TBB on first parallel launch and warns when it is too old
warnings.filterwarnings("ignore", message="The TBB threading layer requires TBB")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

ENV_FLAG = "MCCATCH_DISABLE_NUMBA"


def _disabled_by_env() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


_state = {"numba": HAVE_NUMBA and not _disabled_by_env()}


def numba_enabled() -> bool:
    return _state["numba"]


def current_backend() -> str:
    return "numba" if _state["numba"] else "numpy"


def set_backend(name: str) -> None:
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    _state["numba"] = name == "numba"


@contextmanager
def backend(name: str):
    """Temporarily switch the kernel backend."""
    previous = current_backend()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def set_num_threads(threads: int) -> int:
    """Set the numba worker count; 0 means all available. Returns the count used.

    Requests above the configured maximum are clamped rather than rejected so a
    run configured for a bigger machine still completes with identical output.
    """
    if not HAVE_NUMBA:
        return 1
    limit = numba.config.NUMBA_NUM_THREADS
    used = limit if threads <= 0 else min(threads, limit)
    numba.set_num_threads(used)
    return used


def jit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def wrapper(f):
        return f

    return wrapper
