"""Hot kernels with a numba path and a pure-numpy fallback.

The backend is read from ``IMPLICITQUAD_BACKEND`` (``numba`` or ``numpy``)
at import time; numba is used when importable and not switched off.
``QUAD_THREADS`` caps numba's thread count (0 means one thread).
"""

import contextlib
import os

from . import _numpy
from ._numpy import ROOT_NAN, ROOT_NO_CONVERGENCE, ROOT_NO_SIGN, ROOT_OK

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _numba = None

__all__ = [
    "ROOT_OK", "ROOT_NO_SIGN", "ROOT_NO_CONVERGENCE", "ROOT_NAN",
    "available_backends", "get_backend", "set_backend", "use_backend",
    "eval_program", "segment_roots",
]


def available_backends():
    return ("numba", "numpy") if _numba is not None else ("numpy",)


def _initial_backend():
    requested = os.environ.get("IMPLICITQUAD_BACKEND", "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if _numba is not None else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(f"IMPLICITQUAD_BACKEND must be numba or numpy, not {requested!r}")
    if requested == "numba" and _numba is None:
        raise ImportError("IMPLICITQUAD_BACKEND=numba but numba is not installed")
    return requested


_backend = _initial_backend()


def _apply_thread_cap():
    raw = os.environ.get("QUAD_THREADS")
    if raw is None or _numba is None:
        return
    import numba

    threads = max(1, int(raw))
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


_apply_thread_cap()


def get_backend():
    return _backend


def set_backend(name):
    global _backend
    if name not in available_backends():
        raise ValueError(f"backend {name!r} is not available")
    _backend = name


@contextlib.contextmanager
def use_backend(name):
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def eval_program(program, pts, want_grad=True):
    if _backend == "numba" and pts.shape[0] > 0:
        return _numba.eval_program(program.ops, program.args, program.consts, program.dim,
                                   pts, want_grad, program.depth)
    return _numpy.eval_program(program.ops, program.args, program.consts, program.dim,
                               pts, want_grad)


def segment_roots(field, a, b, fa, fb, tau0, ztol, rtol):
    """Dispatch batched segment root finding for ``field``.

    Expression-backed fields go through the compiled interpreter when the
    numba backend is active; anything else uses the numpy loop.
    """
    program = getattr(field, "program", None)
    if _backend == "numba" and program is not None and a.shape[0] > 0:
        return _numba.segment_roots_program(program, a, b, fa, fb, tau0, ztol, rtol)
    return _numpy.segment_roots(field.value_and_grad, a, b, fa, fb, tau0, ztol, rtol)
