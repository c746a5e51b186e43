"""Gauss-Legendre rules on [0, 1] and collapsed (Duffy) simplex rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OrderOutOfRange

MAX_ORDER = 64


@dataclass(frozen=True)
class QuadRule1D:
    order: int
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class SimplexRule:
    """Points in reference coordinates and weights summing to 1/2 or 1/6."""

    dim: int
    points: np.ndarray
    weights: np.ndarray


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_order(q):
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= MAX_ORDER:
        raise OrderOutOfRange(f"quadrature order must be an integer in [1, {MAX_ORDER}], got {q!r}")


def _legendre(q, x):
    """P_q(x) and P_q'(x) by the three-term recurrence."""
    p0, p1 = 1.0, x
    for k in range(2, q + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    if q == 0:
        return 1.0, 0.0
    dp = q * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def gauss_legendre_01(q: int) -> QuadRule1D:
    """q-point Gauss-Legendre rule mapped to [0, 1], exact to degree 2q-1."""
    _check_order(q)
    half = (q + 1) // 2
    roots = np.empty(half)
    weights = np.empty(half)
    for i in range(half):
        # largest roots first, from the Chebyshev-like asymptotic guess
        x = math.cos(math.pi * (i + 0.75) / (q + 0.5))
        for _ in range(100):
            p, dp = _legendre(q, x)
            dx = p / dp
            x -= dx
            if abs(dx) <= 1e-15:
                break
        p, dp = _legendre(q, x)
        roots[i] = x
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp)
    if q % 2 == 1:
        roots[-1] = 0.0
    # nodes on [0, 1] ascending; mirror the upper half so symmetry is exact
    lower = 0.5 * (1.0 - roots)
    nodes = np.concatenate([lower, (1.0 - lower[: q // 2])[::-1]])
    w = np.concatenate([0.5 * weights, 0.5 * weights[: q // 2][::-1]])
    return QuadRule1D(q, _frozen(nodes), _frozen(w))


@lru_cache(maxsize=None)
def radial_rule(q: int, power: int):
    """Nodes ``a`` and weights for integrals of ``a**power * g(a)`` on [0, 1].

    Weights are rescaled so the rule is exact for constant ``g``; for
    ``2 q - 1 >= power`` the rescaling only touches the last bits.
    """
    r = gauss_legendre_01(q)
    w = r.weights * r.nodes**power
    w = w * ((1.0 / (power + 1)) / w.sum())
    return r.nodes, _frozen(w)


@lru_cache(maxsize=None)
def triangle_rule(q: int) -> SimplexRule:
    """Collapsed rule ``(u, (1 - u) v)`` on the unit right triangle."""
    r = gauss_legendre_01(q)
    u, v = np.meshgrid(r.nodes, r.nodes, indexing="ij")
    wu, wv = np.meshgrid(r.weights, r.weights, indexing="ij")
    pts = np.stack([u.ravel(), ((1.0 - u) * v).ravel()], axis=1)
    w = (wu * wv * (1.0 - u)).ravel()
    return SimplexRule(2, _frozen(pts), _frozen(w))


@lru_cache(maxsize=None)
def tet_rule(q: int) -> SimplexRule:
    """Collapsed rule ``a (mu1, mu2, 1 - mu1 - mu2)`` on the unit corner tet.

    ``a`` is the distance fraction from the origin and ``(mu1, mu2)`` run
    over :func:`triangle_rule`; the Jacobian is ``a**2``.
    """
    a, wa = radial_rule(q, 2)
    tri = triangle_rule(q)
    mu = tri.points
    face = np.stack([mu[:, 0], mu[:, 1], 1.0 - mu[:, 0] - mu[:, 1]], axis=1)
    pts = (a[:, None, None] * face[None, :, :]).reshape(-1, 3)
    w = (wa[:, None] * tri.weights[None, :]).ravel()
    return SimplexRule(3, _frozen(pts), _frozen(w))


def map_rule(rule: SimplexRule, vertices: np.ndarray):
    """Map a reference rule onto simplices given as ``(N, d+1, d)``.

    Returns points ``(N, P, d)`` and weights ``(N, P)``.
    """
    v0 = vertices[:, :1, :]
    edges = vertices[:, 1:, :] - v0
    pts = v0 + np.einsum("pk,nkd->npd", rule.points, edges)
    jac = np.abs(np.linalg.det(edges))
    return pts, jac[:, None] * rule.weights[None, :]
