"""Mesh preparation and element classification shared by the integrators."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import MeshValidationError
from .geometry import CUT_APEX, CUT_TWO_TWO, EMPTY, FULL, Box, classify_signs, sign_pattern, zero_tolerance
from .mesh import DisplacementConfig, MeshValidationReport, SimplicialMesh, build_mesh, displace_vertices, validate_mesh
from .rootfind import segment_roots


@dataclass
class CutElements:
    """Apex-type cut simplices, two-two children included.

    ``vertices`` is ``(M, d+1, d)`` with the apex first; ``roots[:, k]`` is
    the level-set crossing on the edge from the apex to ``vertices[:, k+1]``
    at parameter ``s[:, k]``.  ``apex_sign`` is the sign of F at the apex.
    """

    vertices: np.ndarray
    apex_value: np.ndarray
    roots: np.ndarray
    s: np.ndarray
    parent: np.ndarray

    @property
    def apex(self):
        return self.vertices[:, 0, :]

    @property
    def apex_sign(self):
        return np.sign(self.apex_value)

    def __len__(self):
        return self.vertices.shape[0]


@dataclass
class PreparedMesh:
    mesh: SimplicialMesh
    report: MeshValidationReport
    codes: np.ndarray
    ztol: float
    cut: CutElements
    counts: dict = dc_field(default_factory=dict)

    @property
    def full(self):
        return np.flatnonzero(self.codes == FULL)


def prepare(box: Box, n: int, field, cfg: DisplacementConfig = DisplacementConfig(),
            validate: bool = True) -> PreparedMesh:
    """Mesh the box, displace vertices, validate and classify every simplex."""
    mesh = displace_vertices(build_mesh(box, n), field, cfg)
    report = validate_mesh(mesh, field, c=cfg.c) if validate else MeshValidationReport(np.nan, -1, True)
    if not report.ok:
        raise MeshValidationError(report)
    return classify_mesh(mesh, field, report)


def classify_mesh(mesh: SimplicialMesh, field, report=None) -> PreparedMesh:
    fv = field.value(mesh.vertices)
    ztol = zero_tolerance(fv)
    signs = sign_pattern(fv, ztol)[mesh.simplices]
    codes, apex = classify_signs(signs)
    cut = _cut_elements(mesh, field, fv, signs, codes, apex, ztol)
    counts = {
        "simplices": int(len(codes)),
        "empty": int(np.count_nonzero(codes == EMPTY)),
        "full": int(np.count_nonzero(codes == FULL)),
        "cut_apex": int(np.count_nonzero(codes == CUT_APEX)),
        "cut_two_two": int(np.count_nonzero(codes == CUT_TWO_TWO)),
    }
    return PreparedMesh(mesh, report, codes, ztol, cut, counts)


def _cut_elements(mesh, field, fv, signs, codes, apex, ztol):
    d = mesh.dim
    simp = mesh.simplices
    rows = np.flatnonzero(codes == CUT_APEX)
    a = apex[rows]
    local = np.arange(d + 1)[None, :]
    # apex first, remaining vertices in ascending local order
    rest = np.sort(np.where(local == a[:, None], d + 1, local), axis=1)[:, :d]
    order = np.concatenate([a[:, None], rest], axis=1)
    idx = np.take_along_axis(simp[rows], order, axis=1)
    verts = [mesh.vertices[idx]]
    values = [fv[idx]]
    parents = [rows]

    split = np.flatnonzero(codes == CUT_TWO_TWO)
    if split.size:
        V = mesh.vertices[simp[split]]
        P0, P1, N0, N1, B, fB = choose_splits(field, V, fv[simp[split]], signs[split], ztol)
        child1 = np.stack([N1[0], P0[0], P1[0], B], axis=1)
        child2 = np.stack([P1[0], N0[0], B, N1[0]], axis=1)
        verts += [child1, child2]
        values += [np.stack([N1[1], P0[1], P1[1], fB], axis=1),
                   np.stack([P1[1], N0[1], fB, N1[1]], axis=1)]
        parents += [split, split]

    vertices = np.concatenate(verts)
    vals = np.concatenate(values)
    m = vertices.shape[0]
    A = np.repeat(vertices[:, 0, :], d, axis=0)
    O = vertices[:, 1:, :].reshape(-1, d)
    if m:
        s, _ = segment_roots(field, A, O, ztol, fa=np.repeat(vals[:, 0], d), fb=vals[:, 1:].ravel())
    else:
        s = np.zeros(0)
    roots = (A + s[:, None] * (O - A)).reshape(m, d, d)
    return CutElements(vertices, vals[:, 0], roots, s.reshape(m, d), np.concatenate(parents))


# candidate (positive, negative) pairs for the cut point, canonical first
_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))
SPLIT_MARGIN = 0.25
_SPLIT_SAMPLES = np.array([1 / 64, 1 / 16, 1 / 4, 1 / 2, 3 / 4, 1.0])


def choose_splits(field, V, fv, signs, ztol):
    """Cut point and vertex roles for tetrahedra whose signs split two-two.

    The cut point ``B`` is the root on an edge ``P0 N0``; the children are
    ``[N1, P0, P1, B]`` (apex ``N1``) and ``[P1, N0, B, N1]`` (apex ``P1``).
    Both charts need the level set to stay off the inner edges ``B P1`` and
    ``B N1``, which fails on coarse meshes when the tangent plane at ``B``
    does not separate ``P1`` from ``N1``.  The lowest-index pair is kept
    when it passes that check; otherwise the first passing pair, or failing
    all, the one with the widest tangent-plane margin.

    ``V`` is ``(N, 4, 3)``, ``fv`` and ``signs`` ``(N, 4)``.  Returns
    ``(P0, P1, N0, N1, B, F(B))`` with each role a ``(points, values)`` pair.
    """
    n = V.shape[0]
    rows = np.arange(n)
    local = np.arange(4)[None, :]
    pos = np.sort(np.where(signs > 0, local, 4), axis=1)[:, :2]
    neg = np.sort(np.where(signs < 0, local, 4), axis=1)[:, :2]

    margin = np.empty((n, len(_PAIRS)))
    ok = np.empty((n, len(_PAIRS)), dtype=bool)
    cut = np.empty((n, len(_PAIRS), 3))
    fcut = np.empty((n, len(_PAIRS)))
    for k, (i, j) in enumerate(_PAIRS):
        p0, p1, n0, n1 = pos[:, i], pos[:, 1 - i], neg[:, j], neg[:, 1 - j]
        A, Bend = V[rows, p0], V[rows, n0]
        t, _ = segment_roots(field, A, Bend, ztol, fa=fv[rows, p0], fb=fv[rows, n0])
        B = A + t[:, None] * (Bend - A)
        fB, g = field.value_and_grad(B)
        toP, toN = V[rows, p1] - B, V[rows, n1] - B
        ng = np.linalg.norm(g, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            m = np.minimum(np.einsum("ij,ij->i", g, toP) / np.linalg.norm(toP, axis=1),
                           -np.einsum("ij,ij->i", g, toN) / np.linalg.norm(toN, axis=1)) / ng
        m = np.where(np.isfinite(m), m, -np.inf)
        s = _SPLIT_SAMPLES[None, :, None]
        fP = field.value((B[:, None, :] + s * toP[:, None, :]).reshape(-1, 3)).reshape(n, -1)
        fN = field.value((B[:, None, :] + s * toN[:, None, :]).reshape(-1, 3)).reshape(n, -1)
        margin[:, k] = m
        ok[:, k] = (m > 0) & np.all(fP > 0, axis=1) & np.all(fN < 0, axis=1)
        cut[:, k] = B
        fcut[:, k] = fB

    # canonical pair unless it is invalid or grazing; then the widest valid pair
    score = np.where(ok, margin, -np.inf)
    best = np.where(ok.any(axis=1), np.argmax(score, axis=1), np.argmax(margin, axis=1))
    keep = ok[:, 0] & (margin[:, 0] >= SPLIT_MARGIN)
    choice = np.where(keep, 0, best)
    pi = np.array([_PAIRS[c][0] for c in choice], dtype=np.int64)
    nj = np.array([_PAIRS[c][1] for c in choice], dtype=np.int64)
    roles = (pos[rows, pi], pos[rows, 1 - pi], neg[rows, nj], neg[rows, 1 - nj])
    P0, P1, N0, N1 = ((V[rows, r], fv[rows, r]) for r in roles)
    return P0, P1, N0, N1, cut[rows, choice], fcut[rows, choice]


def single_simplex_mesh(vertices) -> SimplicialMesh:
    """A one-element mesh, for integrating over a single simplex."""
    vertices = np.array(vertices, dtype=float)
    d = vertices.shape[1]
    lo, hi = vertices.min(axis=0), vertices.max(axis=0)
    diam = max(float(np.linalg.norm(vertices[i] - vertices[j])) for i in range(d + 1) for j in range(i))
    return SimplicialMesh(
        dim=d, box=Box(tuple(lo), tuple(hi)), vertices=vertices,
        simplices=np.arange(d + 1)[None, :], n=1, cells=(1,) * d, h=diam,
        h_cell=float((hi - lo).max()), boundary_mask=np.zeros(d + 1, dtype=np.int64),
    )
