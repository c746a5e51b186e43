"""Structured simplicial meshes of a box and vertex displacement off the level set."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .errors import DisplacementFailed
from .geometry import Box, simplex_measures


@dataclass(frozen=True)
class DisplacementConfig:
    c: float = 0.25
    max_passes: int = 3

    def __post_init__(self):
        if not 0.0 < self.c < 0.5:
            raise ValueError("displacement coefficient c must lie in (0, 1/2)")
        if self.max_passes < 1:
            raise ValueError("max_passes must be positive")


@dataclass(frozen=True)
class SimplicialMesh:
    """Vertices ``(V, d)`` and simplices ``(S, d+1)`` tiling ``box``.

    ``boundary_mask`` packs the box faces each vertex lies on: bit ``2k`` is
    the lower face of axis ``k``, bit ``2k+1`` the upper one.  ``h`` is the
    largest simplex diameter, ``h_cell`` the largest grid cell width.
    """

    dim: int
    box: Box
    vertices: np.ndarray
    simplices: np.ndarray
    n: int
    cells: tuple
    h: float
    h_cell: float
    boundary_mask: np.ndarray

    @property
    def free_axes(self) -> np.ndarray:
        """Boolean ``(V, d)``: axes along which each vertex may move."""
        bits = self.boundary_mask[:, None] >> (2 * np.arange(self.dim))[None, :]
        return (bits & 3) == 0

    def simplex_points(self, idx=None) -> np.ndarray:
        s = self.simplices if idx is None else self.simplices[idx]
        return self.vertices[s]

    def measures(self) -> np.ndarray:
        return simplex_measures(self.simplex_points())

    def edges(self) -> np.ndarray:
        pairs = np.concatenate([self.simplices[:, [i, j]] for i, j in combinations(range(self.dim + 1), 2)])
        pairs.sort(axis=1)
        return np.unique(pairs, axis=0)


@dataclass(frozen=True)
class MeshValidationReport:
    min_clearance_ratio: float
    max_sign_changes_per_edge: int
    ok: bool


def cell_counts(box: Box, n: int):
    """``n`` cells on the shortest axis, proportionally more on the others."""
    if n < 1:
        raise ValueError("n must be at least 1")
    lengths = box.lengths
    shortest = lengths.min()
    return tuple(int(math.ceil(n * L / shortest - 1e-9)) for L in lengths)


def _grid(box: Box, counts):
    axes = [np.linspace(lo, hi, m + 1) for lo, hi, m in zip(box.lo, box.hi, counts)]
    # pin the far faces exactly
    for ax, hi in zip(axes, box.hi):
        ax[-1] = hi
    mesh = np.meshgrid(*axes, indexing="ij")
    vertices = np.stack([m.ravel() for m in mesh], axis=1)
    mask = np.zeros(vertices.shape[0], dtype=np.int64)
    idx = np.indices([m + 1 for m in counts]).reshape(len(counts), -1)
    for k, m in enumerate(counts):
        mask |= (idx[k] == 0).astype(np.int64) << (2 * k)
        mask |= (idx[k] == m).astype(np.int64) << (2 * k + 1)
    return vertices, mask


def _finish(box, n, counts, vertices, simplices, mask):
    pts = vertices[simplices]
    vol = simplex_measures(pts)
    flip = vol < 0
    simplices[flip, 0], simplices[flip, 1] = simplices[flip, 1], simplices[flip, 0].copy()
    h_cell = float(max((hi - lo) / m for lo, hi, m in zip(box.lo, box.hi, counts)))
    return SimplicialMesh(
        dim=box.dim, box=box, vertices=vertices, simplices=simplices, n=n,
        cells=tuple(counts), h=_max_diameter(vertices, simplices), h_cell=h_cell,
        boundary_mask=mask,
    )


def _max_diameter(vertices, simplices):
    d = simplices.shape[1]
    best = 0.0
    for i, j in combinations(range(d), 2):
        e = vertices[simplices[:, i]] - vertices[simplices[:, j]]
        best = max(best, float(np.sqrt(np.einsum("ij,ij->i", e, e)).max()))
    return best


def triangulate_rectangle(box: Box, n: int) -> SimplicialMesh:
    if box.dim != 2:
        raise ValueError("triangulate_rectangle needs a 2-D box")
    nx, ny = counts = cell_counts(box, n)
    vertices, mask = _grid(box, counts)
    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    i, j = i.ravel(), j.ravel()
    v00 = i * (ny + 1) + j
    v10 = v00 + (ny + 1)
    v01 = v00 + 1
    v11 = v10 + 1
    lower = np.stack([v00, v10, v11], axis=1)
    upper = np.stack([v00, v11, v01], axis=1)
    simplices = np.stack([lower, upper], axis=1).reshape(-1, 3)
    return _finish(box, n, counts, vertices, simplices, mask)


# local cube corners indexed by (i, j, k) -> 4 i + 2 j + k
_EVEN_CENTRAL = (0, 6, 5, 3)
_EVEN_CORNERS = ((4, 0, 6, 5), (2, 0, 6, 3), (1, 0, 5, 3), (7, 6, 5, 3))
_ODD_CENTRAL = (4, 2, 1, 7)
_ODD_CORNERS = ((0, 4, 2, 1), (6, 4, 2, 7), (5, 4, 1, 7), (3, 2, 1, 7))


def tetrahedralize_box(box: Box, n: int) -> SimplicialMesh:
    """Five tetrahedra per cell, alternating the split with cell parity.

    Neighbouring cells then cut their shared face along the same diagonal.
    """
    if box.dim != 3:
        raise ValueError("tetrahedralize_box needs a 3-D box")
    nx, ny, nz = counts = cell_counts(box, n)
    vertices, mask = _grid(box, counts)
    i, j, k = (a.ravel() for a in np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij"))
    base = (i * (ny + 1) + j) * (nz + 1) + k
    corner = np.empty((base.size, 8), dtype=np.int64)
    for c in range(8):
        ci, cj, ck = (c >> 2) & 1, (c >> 1) & 1, c & 1
        corner[:, c] = base + (ci * (ny + 1) + cj) * (nz + 1) + ck
    even = ((i + j + k) % 2) == 0
    even_tets = np.array((_EVEN_CENTRAL,) + _EVEN_CORNERS)
    odd_tets = np.array((_ODD_CENTRAL,) + _ODD_CORNERS)
    local = np.where(even[:, None, None], even_tets[None], odd_tets[None])
    simplices = np.take_along_axis(corner[:, None, :], local, axis=2).reshape(-1, 4)
    return _finish(box, n, counts, vertices, simplices, mask)


def build_mesh(box: Box, n: int) -> SimplicialMesh:
    return triangulate_rectangle(box, n) if box.dim == 2 else tetrahedralize_box(box, n)


def clearance(mesh_or_vertices, field, free):
    """First-order distance estimate ``|F| / |grad F|`` per vertex.

    Vertices on box faces use the gradient restricted to their face, which
    measures the distance to the level set within that face.  Corners, which
    never move, use the full gradient.  Returns ``(ratio_numerator, F, g)``
    where the first entry is the distance estimate.
    """
    vertices = mesh_or_vertices
    f, g = field.value_and_grad(vertices)
    corner = ~free.any(axis=1)
    gt = np.where(corner[:, None], g, g * free)
    ng = np.sqrt(np.einsum("ij,ij->i", gt, gt))
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.where(ng > 0, np.abs(f) / ng, np.where(f == 0, 0.0, np.inf))
    return dist, f, gt, ng


def _direction(f, g):
    """``sgn(F) g``, with vertices on the level set moved along whichever of
    ``+-g`` has its largest component positive.  The rule gives the same
    mesh for ``F`` and ``-F``."""
    lead = g[np.arange(len(g)), np.argmax(np.abs(g), axis=1)]
    sgn = np.where(f > 0.0, 1.0, np.where(f < 0.0, -1.0, np.sign(lead)))
    return sgn[:, None] * g


def displace_vertices(mesh: SimplicialMesh, field, cfg: DisplacementConfig = DisplacementConfig()):
    """Push vertices closer than ``c h_cell`` to the level set away from it.

    Each offending vertex moves ``c h_cell`` along ``sgn(F) grad F``,
    restricted to its box face (see :func:`_direction` for ``F = 0``); up to ``cfg.max_passes``
    passes.  Raises :class:`DisplacementFailed` if a vertex stays closer than
    ``c h_cell / 2`` or a simplex inverts.
    """
    step = cfg.c * mesh.h_cell
    free = mesh.free_axes
    movable = free.any(axis=1)
    V = mesh.vertices.copy()
    lo = np.asarray(mesh.box.lo)
    hi = np.asarray(mesh.box.hi)
    for _ in range(cfg.max_passes):
        dist, f, gt, ng = clearance(V, field, free)
        if not np.all(np.isfinite(f)):
            raise DisplacementFailed("level-set function is not finite at a mesh vertex")
        near = dist < step
        degenerate = near & movable & (ng <= 1e-12)
        if np.any(degenerate):
            raise DisplacementFailed("vanishing gradient next to the level set; increase n or check F")
        move = near & movable
        if not np.any(move):
            break
        V[move] += (step / ng[move])[:, None] * _direction(f[move], gt[move])
        np.clip(V, lo, hi, out=V)

    dist, _, _, _ = clearance(V, field, free)
    worst = float(dist.min() / mesh.h_cell) if dist.size else math.inf
    if worst < 0.5 * cfg.c:
        raise DisplacementFailed(
            f"a vertex remains within {worst:.3g} h of the level set after "
            f"{cfg.max_passes} passes; increase n"
        )
    before = mesh.measures()
    after = simplex_measures(V[mesh.simplices])
    if np.any(after <= 1e-14 * mesh.h ** mesh.dim) or np.any(np.sign(after) != np.sign(before)):
        raise DisplacementFailed("vertex displacement inverted a simplex; increase n")
    return replace(mesh, vertices=V, h=_max_diameter(V, mesh.simplices))


def validate_mesh(mesh: SimplicialMesh, field, samples_per_edge: int = 16, c: float = 0.25,
                  chunk: int = 1 << 15) -> MeshValidationReport:
    dist, _, _, _ = clearance(mesh.vertices, field, mesh.free_axes)
    ratio = float(dist.min() / mesh.h_cell)
    edges = mesh.edges()
    t = np.linspace(0.0, 1.0, samples_per_edge + 1)
    worst = 0
    for start in range(0, edges.shape[0], chunk):
        e = edges[start:start + chunk]
        a = mesh.vertices[e[:, 0]]
        b = mesh.vertices[e[:, 1]]
        pts = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
        vals = field.value(pts.reshape(-1, mesh.dim)).reshape(len(e), -1)
        s = vals >= 0.0
        changes = np.count_nonzero(s[:, 1:] != s[:, :-1], axis=1)
        worst = max(worst, int(changes.max(initial=0)))
    ok = ratio >= 0.5 * c and worst <= 1
    return MeshValidationReport(ratio, worst, ok)


def write_mesh(mesh: SimplicialMesh, path) -> None:
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write("v " + " ".join(repr(float(x)) for x in v) + "\n")
        for s in mesh.simplices:
            fh.write("s " + " ".join(str(int(i)) for i in s) + "\n")


def read_mesh(path):
    """Vertices and simplices from the text dump written by :func:`write_mesh`."""
    vertices, simplices = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:]])
            elif parts[0] == "s":
                simplices.append([int(x) for x in parts[1:]])
    return np.array(vertices), np.array(simplices, dtype=np.int64)
