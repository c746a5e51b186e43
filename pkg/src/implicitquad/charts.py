"""Apex charts: rays from a lone-sign vertex onto the level set.

A chart is an apex ``A0`` and the roots ``B_1 .. B_d`` of ``F`` on the
edges leaving it.  A parameter point picks ``X`` in the simplex spanned by
the roots; the chart point ``Y`` is where the ray ``A0 -> X`` meets
``F = 0``.  Derivatives of ``Y`` come from the implicit function theorem
applied to ``F(Y) = 0`` plus ``d - 1`` collinearity constraints of ``Y``
with the ray.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoSignChange, SingularJacobian
from .rootfind import segment_roots

MAX_EXTENSIONS = 8
SINGULAR_RTOL = 1e-13

# non-pivot coordinates for each pivot
_OTHERS = {2: np.array([[1], [0]]), 3: np.array([[1, 2], [0, 2], [0, 1]])}


@dataclass
class ChartSample:
    """Chart points ``Y`` ``(M, Q, d)``, Jacobians ``(M, Q, d, d-1)`` and ray data."""

    points: np.ndarray
    jacobians: np.ndarray
    t: np.ndarray
    grad: np.ndarray


def ray_roots(field, apex, X, ztol, t_face=None, fa=None):
    """Roots on rays ``apex + t (X - apex)``.

    ``t_face`` (same leading shape as ``X`` minus the last axis) is where the
    ray leaves the simplex; without it the search starts at ``X`` itself.
    When the far end has the apex's sign the end is pushed out by 1.5x, at
    most eight times.  Returns ``t``.
    """
    shape = X.shape[:-1]
    d = X.shape[-1]
    A = np.broadcast_to(apex[:, None, :], X.shape).reshape(-1, d)
    D = X.reshape(-1, d) - A
    if fa is None:
        fa = field.value(apex)
    fa = np.broadcast_to(np.asarray(fa, float)[:, None], shape).reshape(-1)
    t_end = np.ones(A.shape[0]) if t_face is None else np.asarray(t_face, float).reshape(-1).copy()
    E = A + t_end[:, None] * D
    fe = field.value(E)
    for _ in range(MAX_EXTENSIONS + 1):
        stuck = (np.abs(fe) > ztol) & (np.sign(fe) == np.sign(fa)) & (np.abs(fa) > ztol)
        if not np.any(stuck):
            break
        t_end[stuck] *= 1.5
        E[stuck] = A[stuck] + t_end[stuck, None] * D[stuck]
        fe[stuck] = field.value(E[stuck])
    else:
        raise NoSignChange("a chart ray does not cross the level set; the mesh is invalid, increase n")
    tau, _ = segment_roots(field, A, E, ztol, fa=fa, fb=fe, tau0=1.0 / t_end)
    return (tau * t_end).reshape(shape)


def implicit_jacobian(grad, apex_to_y, D, Xmu):
    """Solve the bordered system for ``dY/dmu``.

    ``grad`` is ``grad F(Y)``, ``apex_to_y = Y - A0``, ``D = X - A0`` (all
    ``(N, d)``) and ``Xmu`` is ``dX/dmu`` ``(N, d, d-1)``.  The pivot
    coordinate of the collinearity constraints is the largest component of
    ``D``, so no ray direction makes the system degenerate by construction.
    """
    n, d = grad.shape
    p = np.argmax(np.abs(D), axis=1)
    others = _OTHERS[d][p]
    rows = np.arange(n)
    M = np.zeros((n, d, d))
    R = np.zeros((n, d, d - 1))
    M[:, 0, :] = grad
    yp = apex_to_y[rows, p]
    Dp = D[rows, p]
    Xp = Xmu[rows, p, :]
    for r in range(d - 1):
        k = others[:, r]
        M[rows, 1 + r, p] = D[rows, k]
        M[rows, 1 + r, k] = -Dp
        R[:, 1 + r, :] = -(yp[:, None] * Xmu[rows, k, :] - apex_to_y[rows, k][:, None] * Xp)
    det = np.linalg.det(M)
    scale = np.linalg.norm(grad, axis=1) * np.linalg.norm(D, axis=1) ** (d - 1)
    if np.any(~(np.abs(det) > SINGULAR_RTOL * scale)):
        raise SingularJacobian("a chart ray is tangent to the level set; the mesh is invalid")
    return np.linalg.solve(M, R)


def sample_charts(field, apex, roots, W, dW, ztol, s=None, fa=None) -> ChartSample:
    """Evaluate charts at parameter points.

    ``apex`` ``(M, d)``, ``roots`` ``(M, d, d)`` with ``roots[:, k]`` the
    k-th edge root, ``W`` ``(Q, d)`` barycentric weights on the roots and
    ``dW`` ``(d, d-1)`` their derivative in the chart parameters.  ``s``
    ``(M, d)`` are the edge parameters of the roots, used to bound each ray
    by the opposite facet.
    """
    m, d = apex.shape
    X = np.einsum("qk,mkd->mqd", W, roots)
    D = X - apex[:, None, :]
    t_face = None if s is None else 1.0 / np.einsum("qk,mk->mq", W, s)
    t = ray_roots(field, apex, X, ztol, t_face=t_face, fa=fa)
    Y = apex[:, None, :] + t[..., None] * D
    _, g = field.value_and_grad(Y.reshape(-1, d))
    Xmu = np.einsum("kj,mkd->mdj", dW, roots)
    q = W.shape[0]
    Xmu_rep = np.broadcast_to(Xmu[:, None], (m, q, d, d - 1)).reshape(-1, d, d - 1)
    J = implicit_jacobian(g, (Y - apex[:, None, :]).reshape(-1, d), D.reshape(-1, d), Xmu_rep)
    return ChartSample(Y, J.reshape(m, q, d, d - 1), t, g.reshape(m, q, d))


def curve_weights(lam):
    lam = np.asarray(lam, dtype=float)
    return np.stack([1.0 - lam, lam], axis=1), np.array([[-1.0], [1.0]])


def surface_weights(mu):
    mu = np.asarray(mu, dtype=float).reshape(-1, 2)
    W = np.stack([mu[:, 0], mu[:, 1], 1.0 - mu[:, 0] - mu[:, 1]], axis=1)
    return W, np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])


def speed(J):
    return np.linalg.norm(J[..., 0], axis=-1)


def area_factor(J):
    return np.linalg.norm(np.cross(J[..., 0], J[..., 1]), axis=-1)
