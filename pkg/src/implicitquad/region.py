"""Integrals over ``{F <= 0}`` inside a box, in 2-D and 3-D.

On a cut simplex the part on the apex's side of the level set is a
curved cone ``(1 - a) A0 + a Y(mu)``, with ``Y`` the chart point on the
level set and ``a`` the fraction of the way from the apex.  When the apex
lies outside the region the cone is subtracted from the whole simplex.
"""

from __future__ import annotations

import numpy as np

from .assembly import QuadResult, chunks, integrand_values, min_or_inf, total
from .charts import curve_weights, sample_charts, surface_weights
from .elements import classify_mesh, prepare, single_simplex_mesh
from .fields import as_field
from .geometry import Box
from .mesh import DisplacementConfig
from .rules import gauss_legendre_01, map_rule, radial_rule, tet_rule, triangle_rule


def _simplex_integrals(f, vertices, q):
    """Integral of ``f`` over each simplex in ``(N, d+1, d)``."""
    d = vertices.shape[2]
    rule = triangle_rule(q) if d == 2 else tet_rule(q)
    const = f.constant
    if const is not None:
        edges = vertices[:, 1:, :] - vertices[:, :1, :]
        return [const * np.abs(np.linalg.det(edges)) * rule.weights.sum()]
    parts = []
    for sl in chunks(vertices.shape[0], len(rule.weights)):
        pts, w = map_rule(rule, vertices[sl])
        parts.append(np.sum(w * integrand_values(f, pts), axis=1))
    return parts


def _base_rule(d, q):
    if d == 2:
        r = gauss_legendre_01(q)
        W, dW = curve_weights(r.nodes)
        return W, dW, r.weights
    r = triangle_rule(q)
    W, dW = surface_weights(r.points)
    return W, dW, r.weights


def _cone_jacobian(sample, apex):
    """``det[Y - A0, dY/dmu]`` per chart point; ``a**(d-1)`` is in the radial rule."""
    J = sample.jacobians
    R = sample.points - apex[:, None, :]
    if J.shape[-1] == 1:
        return R[..., 0] * J[..., 1, 0] - R[..., 1] * J[..., 0, 0]
    return np.einsum("mqd,mqd->mq", R, np.cross(J[..., 0], J[..., 1]))


def _cone_integrals(F, f, cut, q, ztol):
    """Integral over the apex side of the level set for each cut element."""
    d = cut.apex.shape[1]
    W, dW, wbase = _base_rule(d, q)
    a, wa = radial_rule(q, d - 1)
    parts, wmin = [], np.inf
    for sl in chunks(len(cut), len(wbase) * q):
        apex = cut.apex[sl]
        sample = sample_charts(F, apex, cut.roots[sl], W, dW, ztol,
                               s=cut.s[sl], fa=cut.apex_value[sl])
        jac = np.abs(_cone_jacobian(sample, apex))
        # (m, radial, base, d)
        pts = ((1.0 - a)[None, :, None, None] * apex[:, None, None, :]
               + a[None, :, None, None] * sample.points[:, None, :, :])
        w = wa[None, :, None] * (wbase[None, :] * jac)[:, None, :]
        wmin = min(wmin, min_or_inf(w))
        parts.append(np.sum(w * integrand_values(f, pts), axis=(1, 2)))
    return np.concatenate(parts) if parts else np.zeros(0), wmin


def _region(prepared, F, f, q):
    full = prepared.full
    parts = _simplex_integrals(f, prepared.mesh.simplex_points(full), q) if full.size else []
    cut = prepared.cut
    cone, wmin = _cone_integrals(F, f, cut, q, prepared.ztol)
    inside = cut.apex_sign < 0
    parts.append(cone[inside])
    outside = np.flatnonzero(~inside)
    if outside.size:
        whole = np.concatenate(_simplex_integrals(f, cut.vertices[outside], q))
        parts.append(whole)
        parts.append(-cone[outside])
    return total(parts), wmin


def integrate_region_simplex(simplex, F, f, q):
    simplex = np.asarray(simplex, dtype=float)
    d = simplex.shape[1]
    F, f = as_field(F, d), as_field(f, d)
    prepared = classify_mesh(single_simplex_mesh(simplex), F)
    return _region(prepared, F, f, q)[0]


def integrate_region_triangle(tri, F, f, q):
    return integrate_region_simplex(tri, F, f, q)


def integrate_region_tet(tet, F, f, q):
    return integrate_region_simplex(tet, F, f, q)


def integrate_region(box, n, F, f="1", q=8, cfg=DisplacementConfig(), *, full_output=False):
    """Integral of ``f`` over ``{F <= 0}`` inside a 2-D or 3-D box."""
    box = box if isinstance(box, Box) else Box.from_flat(box)
    F, f = as_field(F, box.dim), as_field(f, box.dim)
    prepared = prepare(box, n, F, cfg)
    value, wmin = _region(prepared, F, f, q)
    if not full_output:
        return value
    m = prepared.mesh
    return QuadResult(value, prepared.counts, prepared.report, wmin, m.h, m.h_cell)


def integrate_region2d(box, n, F, f="1", q=8, cfg=DisplacementConfig(), **kw):
    box = box if isinstance(box, Box) else Box.from_flat(box)
    if box.dim != 2:
        raise ValueError("integrate_region2d needs a 2-D box")
    return integrate_region(box, n, F, f, q, cfg, **kw)


def integrate_region3d(box, n, F, f="1", q=8, cfg=DisplacementConfig(), **kw):
    box = box if isinstance(box, Box) else Box.from_flat(box)
    if box.dim != 3:
        raise ValueError("integrate_region3d needs a 3-D box")
    return integrate_region(box, n, F, f, q, cfg, **kw)
