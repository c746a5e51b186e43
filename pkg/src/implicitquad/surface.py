"""Surface integrals over the zero level set of a 3-D function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import QuadResult, chunks, integrand_values, min_or_inf, total
from .charts import area_factor, sample_charts, surface_weights
from .elements import choose_splits, classify_mesh, prepare, single_simplex_mesh
from .errors import AmbiguousSigns
from .fields import as_field
from .geometry import Box, sign_pattern, zero_tolerance
from .mesh import DisplacementConfig
from .rules import triangle_rule


@dataclass(frozen=True)
class SurfaceChart:
    apex: tuple
    b1: tuple
    b2: tuple
    b3: tuple


def split_case2_tet(tet, F):
    """Split a tetrahedron whose vertex signs split two-two.

    The cut point ``B`` is the root on the edge joining the lowest-index
    positive and the lowest-index negative vertex, unless the level set
    would cross an inner edge of the children, in which case another pair
    is used (see :func:`~implicitquad.elements.choose_splits`).  Returns the
    children ``(P0, P1, B, N1)`` and ``(N0, P1, B, N1)`` as ``(4, 3)`` arrays.
    """
    F = as_field(F, 3)
    tet = np.asarray(tet, dtype=float)
    fv = F.value(tet)
    ztol = zero_tolerance(fv)
    signs = sign_pattern(fv, ztol)
    if np.count_nonzero(signs > 0) != 2 or np.count_nonzero(signs < 0) != 2:
        raise AmbiguousSigns(f"sign pattern {signs.tolist()} is not a two-two split")
    (p0, _), (p1, _), (n0, _), (n1, _), B, _ = choose_splits(F, tet[None], fv[None], signs[None], ztol)
    return np.stack([p0[0], p1[0], B[0], n1[0]]), np.stack([n0[0], p1[0], B[0], n1[0]])


def surface_point_and_jacobian(F, chart: SurfaceChart, mu):
    """Chart points on the surface and ``sqrt(det(J^T J))`` for each ``mu``."""
    F = as_field(F, 3)
    mu = np.asarray(mu, dtype=float).reshape(-1, 2)
    apex = np.asarray(chart.apex, float)[None, :]
    roots = np.asarray([chart.b1, chart.b2, chart.b3], float)[None]
    W, dW = surface_weights(mu)
    fa = F.value(apex)
    ztol = zero_tolerance(np.concatenate([fa, F.value(roots[0])]))
    sample = sample_charts(F, apex, roots, W, dW, ztol, fa=fa)
    return sample.points[0], area_factor(sample.jacobians[0])


def _cut_contributions(F, f, cut, q, ztol):
    rule = triangle_rule(q)
    W, dW = surface_weights(rule.points)
    parts, wmin = [], np.inf
    for sl in chunks(len(cut), len(rule.weights)):
        sample = sample_charts(F, cut.apex[sl], cut.roots[sl], W, dW, ztol,
                               s=cut.s[sl], fa=cut.apex_value[sl])
        w = rule.weights[None, :] * area_factor(sample.jacobians)
        wmin = min(wmin, min_or_inf(w))
        parts.append(np.sum(w * integrand_values(f, sample.points), axis=1))
    return parts, wmin


def integrate_surface_tet(tet, F, f, q):
    F, f = as_field(F, 3), as_field(f, 3)
    prepared = classify_mesh(single_simplex_mesh(tet), F)
    parts, _ = _cut_contributions(F, f, prepared.cut, q, prepared.ztol)
    return total(parts)


def integrate_surface(box, n, F, f="1", q=8, cfg=DisplacementConfig(), *, full_output=False):
    """Integral of ``f`` over ``{F = 0}`` inside a 3-D box."""
    box = box if isinstance(box, Box) else Box.from_flat(box)
    F, f = as_field(F, 3), as_field(f, 3)
    prepared = prepare(box, n, F, cfg)
    parts, wmin = _cut_contributions(F, f, prepared.cut, q, prepared.ztol)
    value = total(parts)
    if not full_output:
        return value
    m = prepared.mesh
    return QuadResult(value, prepared.counts, prepared.report, wmin, m.h, m.h_cell)
