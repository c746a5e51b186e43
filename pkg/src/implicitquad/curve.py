"""Line integrals over the zero level set of a 2-D function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import QuadResult, chunks, integrand_values, min_or_inf, total
from .charts import curve_weights, sample_charts, speed
from .elements import classify_mesh, prepare, single_simplex_mesh
from .fields import as_field
from .geometry import Box, zero_tolerance
from .mesh import DisplacementConfig
from .rules import gauss_legendre_01


@dataclass(frozen=True)
class CurveChart:
    apex: tuple
    b1: tuple
    b2: tuple


def curve_point_and_jacobian(F, chart: CurveChart, lam):
    """Chart point on the curve and its speed ``|dY/dlam|`` for each ``lam``."""
    F = as_field(F, 2)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    apex = np.asarray(chart.apex, float)[None, :]
    roots = np.asarray([chart.b1, chart.b2], float)[None, :, :]
    W, dW = curve_weights(lam)
    fa = F.value(apex)
    ztol = zero_tolerance(np.concatenate([fa, F.value(roots[0])]))
    sample = sample_charts(F, apex, roots, W, dW, ztol, fa=fa)
    return sample.points[0], speed(sample.jacobians[0])


def _cut_contributions(F, f, cut, q, ztol):
    rule = gauss_legendre_01(q)
    W, dW = curve_weights(rule.nodes)
    parts, wmin = [], np.inf
    for sl in chunks(len(cut), q):
        sample = sample_charts(F, cut.apex[sl], cut.roots[sl], W, dW, ztol,
                               s=cut.s[sl], fa=cut.apex_value[sl])
        w = rule.weights[None, :] * speed(sample.jacobians)
        wmin = min(wmin, min_or_inf(w))
        parts.append(np.sum(w * integrand_values(f, sample.points), axis=1))
    return parts, wmin


def integrate_curve_triangle(tri, F, f, q):
    """Integral of ``f`` over the part of ``F = 0`` inside one triangle."""
    F, f = as_field(F, 2), as_field(f, 2)
    tri = np.asarray(tri, float)
    prepared = classify_mesh(single_simplex_mesh(tri), F)
    parts, _ = _cut_contributions(F, f, prepared.cut, q, prepared.ztol)
    return total(parts)


def integrate_curve(box, n, F, f="1", q=8, cfg=DisplacementConfig(), *, full_output=False):
    """Integral of ``f`` over ``{F = 0}`` inside ``box`` on an ``n``-cell mesh."""
    box = box if isinstance(box, Box) else Box.from_flat(box)
    F, f = as_field(F, 2), as_field(f, 2)
    prepared = prepare(box, n, F, cfg)
    parts, wmin = _cut_contributions(F, f, prepared.cut, q, prepared.ztol)
    value = total(parts)
    if not full_output:
        return value
    m = prepared.mesh
    return QuadResult(value, prepared.counts, prepared.report, wmin, m.h, m.h_cell)
