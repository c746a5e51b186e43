"""Geometric primitives: boxes, element cases and sign classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import AmbiguousSigns

EMPTY, FULL, CUT_APEX, CUT_TWO_TWO = 0, 1, 2, 3


@dataclass(frozen=True)
class Box:
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or len(lo) not in (2, 3):
            raise ValueError("box must have 2 or 3 axes")
        if not all(np.isfinite(lo + hi)):
            raise ValueError("box bounds must be finite")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"degenerate box {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_flat(cls, bounds: Sequence[float]) -> "Box":
        """Build from ``(x0, x1, y0, y1[, z0, z1])``."""
        bounds = [float(b) for b in bounds]
        if len(bounds) not in (4, 6):
            raise ValueError("box needs 4 or 6 numbers")
        return cls(tuple(bounds[0::2]), tuple(bounds[1::2]))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def lengths(self) -> np.ndarray:
        return np.subtract(self.hi, self.lo)

    @property
    def measure(self) -> float:
        return float(np.prod(self.lengths))

    def flat(self) -> list:
        return [v for pair in zip(self.lo, self.hi) for v in pair]


@dataclass(frozen=True)
class ElementCase:
    """How a simplex meets the zero level set.

    ``apex`` is the local index of the lone-sign vertex for ``CutApex``;
    ``positive_pair`` holds the two positive local indices for ``CutTwoTwo``.
    """

    tag: str
    apex: Optional[int] = None
    positive_pair: Optional[Tuple[int, int]] = None

    @classmethod
    def empty(cls):
        return cls("Empty")

    @classmethod
    def full(cls):
        return cls("Full")

    @classmethod
    def cut_apex(cls, i):
        return cls("CutApex", apex=int(i))

    @classmethod
    def cut_two_two(cls, pair):
        return cls("CutTwoTwo", positive_pair=tuple(int(i) for i in pair))


def zero_tolerance(values) -> float:
    """Absolute tolerance below which a level-set value counts as zero."""
    values = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return 1e-12 * max(1.0, scale)


def sign_pattern(values, tol: float) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    s = np.sign(values).astype(np.int8)
    s[np.abs(values) <= tol] = 0
    return s


def classify_signs(signs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised classification of an ``(N, d+1)`` sign array.

    Returns ``(code, apex)`` where ``code`` is one of EMPTY, FULL, CUT_APEX,
    CUT_TWO_TWO and ``apex`` the local apex index (-1 when not applicable).
    Zeros join the strict majority.  Rows with more than one zero, or with a
    zero and no strict majority, raise :class:`AmbiguousSigns`.
    """
    signs = np.asarray(signs)
    nv = signs.shape[1]
    npos = np.count_nonzero(signs > 0, axis=1)
    nneg = np.count_nonzero(signs < 0, axis=1)
    nzero = nv - npos - nneg
    bad = (nzero > 1) | ((nzero == 1) & (npos == nneg))
    if np.any(bad):
        row = int(np.flatnonzero(bad)[0])
        raise AmbiguousSigns(f"simplex sign pattern {signs[row].tolist()} is ambiguous")

    code = np.full(len(signs), CUT_APEX, dtype=np.int8)
    apex = np.full(len(signs), -1, dtype=np.int64)
    code[nneg == 0] = EMPTY
    code[npos == 0] = FULL
    code[(npos == 2) & (nneg == 2)] = CUT_TWO_TWO

    # zeros join the majority, so the apex is the lone strict minority
    pos_minority = (code == CUT_APEX) & (npos < nneg)
    neg_minority = (code == CUT_APEX) & (nneg < npos)
    apex[pos_minority] = np.argmax(signs[pos_minority] > 0, axis=1)
    apex[neg_minority] = np.argmax(signs[neg_minority] < 0, axis=1)
    lone = (code == CUT_APEX) & (np.minimum(npos, nneg) != 1)
    if np.any(lone):
        row = int(np.flatnonzero(lone)[0])
        raise AmbiguousSigns(f"simplex sign pattern {signs[row].tolist()} has no lone vertex")
    return code, apex


def classify_simplex(signs: Sequence[int], dim: int) -> ElementCase:
    signs = np.asarray(signs, dtype=np.int8)
    if signs.shape != (dim + 1,):
        raise ValueError(f"expected {dim + 1} signs, got {len(signs)}")
    if np.all(signs == 0):
        raise AmbiguousSigns("all vertices lie on the level set")
    code, apex = classify_signs(signs[None, :])
    code, apex = int(code[0]), int(apex[0])
    if code == EMPTY:
        return ElementCase.empty()
    if code == FULL:
        return ElementCase.full()
    if code == CUT_TWO_TWO:
        if dim != 3:
            raise AmbiguousSigns("two-two split is impossible in 2-D")
        return ElementCase.cut_two_two(np.flatnonzero(signs > 0))
    return ElementCase.cut_apex(apex)


def barycentric_point(vertices, weights) -> np.ndarray:
    vertices = np.asarray(vertices, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("barycentric weights must sum to 1")
    return weights @ vertices


def simplex_measures(points: np.ndarray) -> np.ndarray:
    """Signed measures of simplices given as an ``(N, d+1, d)`` array."""
    edges = points[:, 1:, :] - points[:, :1, :]
    d = points.shape[2]
    fact = 2.0 if d == 2 else 6.0
    return np.linalg.det(edges) / fact
