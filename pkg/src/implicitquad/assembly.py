"""Shared pieces of element assembly: results, chunking, exact summation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EvalDomainError
from .mesh import MeshValidationReport

POINTS_PER_CHUNK = 1 << 20


@dataclass
class QuadResult:
    value: float
    counts: dict
    report: MeshValidationReport
    min_effective_weight: float
    h: float
    h_cell: float
    extras: dict = field(default_factory=dict)


def chunks(n_elements: int, points_per_element: int):
    step = max(1, POINTS_PER_CHUNK // max(1, points_per_element))
    for start in range(0, n_elements, step):
        yield slice(start, min(n_elements, start + step))


def total(parts) -> float:
    """Correctly rounded sum of per-element contributions, order independent."""
    flat = np.concatenate([np.ravel(p) for p in parts]) if parts else np.zeros(0)
    return math.fsum(flat.tolist())


def integrand_values(f, pts):
    vals = f.value(pts.reshape(-1, pts.shape[-1])).reshape(pts.shape[:-1])
    if not np.all(np.isfinite(vals)):
        raise EvalDomainError("integrand is not finite at a quadrature point")
    return vals


def min_or_inf(values):
    values = np.asarray(values)
    return float(values.min()) if values.size else math.inf
