"""Root of a level-set function along straight segments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EvalDomainError, NoConvergence, NoSignChange

ROOT_RTOL = 1e-14


@dataclass(frozen=True)
class SegmentRoot:
    t: float
    point: np.ndarray
    fvalue: float


def check_status(status):
    if np.all(status == kernels.ROOT_OK):
        return
    for code, exc, what in (
        (kernels.ROOT_NAN, EvalDomainError, "level-set value is not finite on a segment"),
        (kernels.ROOT_NO_SIGN, NoSignChange, "no sign change on a segment"),
        (kernels.ROOT_NO_CONVERGENCE, NoConvergence,
         "root bracketing did not converge; the level-set function may be nonsmooth"),
    ):
        n = int(np.count_nonzero(status == code))
        if n:
            raise exc(f"{what} ({n} of {status.size})")


def segment_roots(field, a, b, ztol, fa=None, fb=None, tau0=None, raise_errors=True):
    """Parameters ``t`` in [0, 1] of the roots on segments ``a -> b``.

    An endpoint with ``|F| <= ztol`` is returned as the root.  Returns
    ``(t, status)``; with ``raise_errors`` any failed segment raises.
    """
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if fa is None:
        fa = field.value(a)
    if fb is None:
        fb = field.value(b)
    if tau0 is None:
        tau0 = np.full(a.shape[0], 0.5)
    t, _, status = kernels.segment_roots(field, a, b, np.asarray(fa, float), np.asarray(fb, float),
                                         np.asarray(tau0, float), ztol, ROOT_RTOL)
    if raise_errors:
        check_status(status)
    return t, status


def root_on_segment(field, a, b, ztol: float = 0.0) -> SegmentRoot:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t, _ = segment_roots(field, a[None, :], b[None, :], ztol)
    t = float(t[0])
    point = a + t * (b - a)
    return SegmentRoot(t, point, float(field.value(point[None, :])[0]))
