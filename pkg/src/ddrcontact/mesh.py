"""Fracture-compliant 3D polytopal meshes.

Cells are star-shaped polyhedra with planar polygonal faces.  A mesh can
carry a fracture network: a set of interior faces across which the
displacement field is allowed to jump.  Vertices and edges lying on the
fracture network get their incident cells partitioned into "sides", which
drives the duplication of degrees of freedom in the discrete space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MeshError",
    "FracturePlane",
    "PolyMesh",
    "FractureNetwork",
    "SideClasses",
    "build_cartesian",
    "build_tetrahedral",
    "build_hexacut",
    "classify_fracture_sides",
    "validate",
    "write_polymesh",
    "read_polymesh",
]

_AXES = {"x": 0, "y": 1, "z": 2}


class MeshError(Exception):
    """Raised for invalid mesh input or degenerate geometry."""


@dataclass(frozen=True)
class FracturePlane:
    """Axis-aligned fracture plane, optionally restricted to a rectangle.

    ``axis`` is one of ``"x"``, ``"y"``, ``"z"``; ``value`` is the plane
    coordinate along that axis.  ``extent``, when given, is a pair of
    ``(lo, hi)`` intervals for the two remaining axes (in axis order).
    ``g`` is the Tresca threshold carried by the faces of this plane.
    """

    axis: str
    value: float
    extent: tuple[tuple[float, float], tuple[float, float]] | None = None
    g: float = 0.0

    def __post_init__(self):
        if self.axis not in _AXES:
            raise MeshError(f"unknown axis {self.axis!r}")
        if self.g < 0:
            raise MeshError("Tresca threshold must be nonnegative")


def _newell_normal(coords):
    """Unit normal of a polygon from its vertex loop (Newell's formula)."""
    v = coords
    w = np.roll(v, -1, axis=0)
    n = np.array([
        np.sum((v[:, 1] - w[:, 1]) * (v[:, 2] + w[:, 2])),
        np.sum((v[:, 2] - w[:, 2]) * (v[:, 0] + w[:, 0])),
        np.sum((v[:, 0] - w[:, 0]) * (v[:, 1] + w[:, 1])),
    ])
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise MeshError("degenerate face loop")
    return n / norm


def _polygon_geometry(coords):
    """Area, barycenter, and diameter of a planar polygon loop."""
    c0 = coords.mean(axis=0)
    a = coords
    b = np.roll(coords, -1, axis=0)
    cross = np.cross(a - c0, b - c0)
    tri_area = 0.5 * np.linalg.norm(cross, axis=1)
    area = tri_area.sum()
    if area <= 0.0:
        raise MeshError("zero-area face")
    centroid = ((c0 + a + b) / 3.0 * tri_area[:, None]).sum(axis=0) / area
    diam = _diameter(coords)
    return area, centroid, diam


def _diameter(coords):
    d = coords[:, None, :] - coords[None, :, :]
    return float(np.sqrt((d * d).sum(axis=2).max()))


class PolyMesh:
    """Immutable polytopal mesh with full incidence information.

    Faces store an oriented vertex loop; the face normal follows the loop
    orientation (Newell).  For each cell, ``cell_face_sign[K][i]`` is +1 if
    the stored normal of the i-th face points outward from ``K``.
    """

    def __init__(self, vertices, face_loops, cell_faces, cell_face_sign):
        self.vertices = np.asarray(vertices, dtype=float)
        if not np.all(np.isfinite(self.vertices)):
            raise MeshError("non-finite vertex coordinates")
        self.face_loops = [list(map(int, loop)) for loop in face_loops]
        self.cell_faces = [list(map(int, fs)) for fs in cell_faces]
        self.cell_face_sign = [list(map(int, ss)) for ss in cell_face_sign]
        self._build_edges()
        self._face_geometry()
        self._incidence()
        self._cell_geometry()
        self._boundary_flags()

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    @classmethod
    def from_cell_loops(cls, vertices, cells_as_loops):
        """Build a mesh from per-cell face loops oriented outward.

        Shared faces are deduplicated by their vertex set; the stored loop
        (and hence the face normal) comes from the first cell that
        contributed the face.
        """
        face_index = {}
        face_loops = []
        cell_faces = []
        cell_face_sign = []
        for loops in cells_as_loops:
            fids, signs = [], []
            for loop in loops:
                key = tuple(sorted(loop))
                fid = face_index.get(key)
                if fid is None:
                    fid = len(face_loops)
                    face_index[key] = fid
                    face_loops.append(list(loop))
                    signs.append(1)
                else:
                    # the second cell sees the stored normal as inward
                    signs.append(-1)
                fids.append(fid)
            cell_faces.append(fids)
            cell_face_sign.append(signs)
        return cls(vertices, face_loops, cell_faces, cell_face_sign)

    def _build_edges(self):
        edge_index = {}
        edges = []
        self.face_edges = []
        for loop in self.face_loops:
            fe = []
            for i in range(len(loop)):
                a, b = loop[i], loop[(i + 1) % len(loop)]
                key = (a, b) if a < b else (b, a)
                eid = edge_index.get(key)
                if eid is None:
                    eid = len(edges)
                    edge_index[key] = eid
                    edges.append(key)
                fe.append(eid)
            self.face_edges.append(fe)
        self.edges = np.array(edges, dtype=int).reshape(-1, 2)

    def _face_geometry(self):
        nf = len(self.face_loops)
        self.face_normal = np.zeros((nf, 3))
        self.face_area = np.zeros(nf)
        self.face_center = np.zeros((nf, 3))
        self.face_diam = np.zeros(nf)
        for f, loop in enumerate(self.face_loops):
            coords = self.vertices[loop]
            if len(set(loop)) != len(loop):
                raise MeshError(f"face {f} has a repeated vertex in its loop")
            n = _newell_normal(coords)
            area, center, diam = _polygon_geometry(coords)
            off = np.abs((coords - center) @ n).max()
            if off > 1e-12 * max(diam, 1.0):
                raise MeshError(f"face {f} is not planar (offset {off:.3e})")
            self.face_normal[f] = n
            self.face_area[f] = area
            self.face_center[f] = center
            self.face_diam[f] = diam

    def _cell_geometry(self):
        nc = len(self.cell_faces)
        self.cell_volume = np.zeros(nc)
        self.cell_center = np.zeros((nc, 3))
        self.cell_diam = np.zeros(nc)
        for K in range(nc):
            verts = self.cell_vertices(K)
            p0 = self.vertices[verts].mean(axis=0)
            vol = 0.0
            mom = np.zeros(3)
            for a, b, c in self.cell_boundary_triangles(K):
                sv = np.dot(np.cross(a - p0, b - p0), c - p0) / 6.0
                vol += sv
                mom += sv * (p0 + a + b + c) / 4.0
            if vol <= 0.0:
                raise MeshError(f"cell {K} has non-positive volume {vol:.3e}")
            self.cell_volume[K] = vol
            self.cell_center[K] = mom / vol
            self.cell_diam[K] = _diameter(self.vertices[verts])
        self.h = float(self.cell_diam.max())

    def _incidence(self):
        nf = len(self.face_loops)
        self.cells_of_face = [[] for _ in range(nf)]
        for K, fids in enumerate(self.cell_faces):
            for f in fids:
                self.cells_of_face[f].append(K)
        self._cell_vertices = []
        self._cell_edges = []
        for K, fids in enumerate(self.cell_faces):
            vs, es = set(), set()
            for f in fids:
                vs.update(self.face_loops[f])
                es.update(self.face_edges[f])
            self._cell_vertices.append(sorted(vs))
            self._cell_edges.append(sorted(es))
        nv = len(self.vertices)
        ne = len(self.edges)
        self.cells_of_vertex = [[] for _ in range(nv)]
        self.cells_of_edge = [[] for _ in range(ne)]
        for K in range(len(self.cell_faces)):
            for s in self._cell_vertices[K]:
                self.cells_of_vertex[s].append(K)
            for e in self._cell_edges[K]:
                self.cells_of_edge[e].append(K)
        self.faces_of_vertex = [[] for _ in range(nv)]
        self.faces_of_edge = [[] for _ in range(ne)]
        for f, loop in enumerate(self.face_loops):
            for s in loop:
                self.faces_of_vertex[s].append(f)
            for e in self.face_edges[f]:
                self.faces_of_edge[e].append(f)

    def _boundary_flags(self):
        nf = len(self.face_loops)
        self.face_on_boundary = np.array(
            [len(self.cells_of_face[f]) == 1 for f in range(nf)]
        )
        self.vertex_on_boundary = np.zeros(len(self.vertices), dtype=bool)
        self.edge_on_boundary = np.zeros(len(self.edges), dtype=bool)
        for f in np.flatnonzero(self.face_on_boundary):
            self.vertex_on_boundary[self.face_loops[f]] = True
            self.edge_on_boundary[self.face_edges[f]] = True

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------
    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_faces(self):
        return len(self.face_loops)

    @property
    def n_cells(self):
        return len(self.cell_faces)

    def cell_vertices(self, K):
        return self._cell_vertices[K]

    def cell_edges(self, K):
        return self._cell_edges[K]

    def cell_boundary_triangles(self, K, with_face=False):
        """Outward-oriented triangles covering the boundary of cell K.

        Each face is fanned from its barycenter; triangle orientation
        follows the outward normal of the cell.
        """
        tris = []
        for f, sign in zip(self.cell_faces[K], self.cell_face_sign[K]):
            loop = self.face_loops[f]
            if sign < 0:
                loop = loop[::-1]
            coords = self.vertices[loop]
            if len(loop) == 3:
                sub = [(coords[0], coords[1], coords[2])]
            else:
                c = self.face_center[f]
                sub = [
                    (c, coords[i], coords[(i + 1) % len(loop)])
                    for i in range(len(loop))
                ]
            for tri in sub:
                tris.append(tri + (f,) if with_face else tri)
        return tris

    def face_frame(self, f):
        """In-plane orthonormal axes (t1, t2) with t1 along the first loop edge."""
        loop = self.face_loops[f]
        t1 = self.vertices[loop[1]] - self.vertices[loop[0]]
        t1 = t1 / np.linalg.norm(t1)
        n = self.face_normal[f]
        t2 = np.cross(n, t1)
        return t1, t2

    def edge_outward_normals(self, f):
        """In-plane outward normals of face f along each of its edges.

        Returned in loop-edge order (edge i joins loop vertex i to i+1).
        """
        loop = self.face_loops[f]
        n = self.face_normal[f]
        out = []
        for i in range(len(loop)):
            d = self.vertices[loop[(i + 1) % len(loop)]] - self.vertices[loop[i]]
            d = d / np.linalg.norm(d)
            out.append(np.cross(d, n))
        return out


@dataclass
class FractureNetwork:
    """Fracture faces with their orientation and Tresca thresholds.

    ``n_plus[i]`` equals the outward normal of ``pos_cell[i]`` on face
    ``face_ids[i]``; the displacement jump on the face is the trace from
    the positive cell minus the trace from the negative cell.
    """

    face_ids: np.ndarray
    n_plus: np.ndarray
    pos_cell: np.ndarray
    g: np.ndarray
    _face_set: set = field(default=None, repr=False)

    def __post_init__(self):
        self.face_ids = np.asarray(self.face_ids, dtype=int)
        self.n_plus = np.asarray(self.n_plus, dtype=float)
        self.pos_cell = np.asarray(self.pos_cell, dtype=int)
        self.g = np.asarray(self.g, dtype=float)
        if np.any(self.g < 0):
            raise MeshError("Tresca threshold must be nonnegative")
        self._face_set = set(self.face_ids.tolist())

    @property
    def n_faces(self):
        return len(self.face_ids)

    def is_fracture_face(self, f):
        return f in self._face_set

    def sides(self, mesh, i):
        """(positive cell, negative cell) of the i-th fracture face."""
        f = self.face_ids[i]
        K = self.pos_cell[i]
        cells = mesh.cells_of_face[f]
        if len(cells) != 2:
            raise MeshError(f"fracture face {f} is not interior")
        L = cells[0] if cells[1] == K else cells[1]
        return K, L

    @classmethod
    def empty(cls):
        return cls(
            np.zeros(0, dtype=int), np.zeros((0, 3)), np.zeros(0, dtype=int),
            np.zeros(0),
        )


@dataclass
class SideClasses:
    """Per-entity partitions of incident cells into fracture sides.

    ``vertex_classes[s]`` (and likewise for edges) is a list of sorted cell
    tuples; cells belong to the same class iff they are connected through
    shared non-fracture faces containing the entity.  ``face_sides[f]`` is
    a list of cell tuples: the two singletons for a fracture face, one
    tuple otherwise.
    """

    vertex_classes: list
    edge_classes: list
    face_sides: list


# ----------------------------------------------------------------------
# generators
# ----------------------------------------------------------------------


def _grid_coords(n, lo, hi):
    return np.linspace(lo, hi, n + 1)


def _check_plane_compliance(plane, axes_coords, domain):
    ax = _AXES[plane.axis]
    coords = axes_coords[ax]
    if not np.any(np.isclose(coords, plane.value, atol=1e-12)):
        raise MeshError(
            f"fracture plane {plane.axis}={plane.value} does not coincide "
            f"with a mesh plane (grid: {coords})"
        )
    if plane.extent is not None:
        other = [a for a in range(3) if a != ax]
        for (lo, hi), a in zip(plane.extent, other):
            for v in (lo, hi):
                if not np.any(np.isclose(axes_coords[a], v, atol=1e-12)):
                    raise MeshError(
                        f"fracture extent bound {v} along axis {a} does not "
                        "align with the grid"
                    )


def _on_plane(points, plane, include_extent=True, atol=1e-12):
    ax = _AXES[plane.axis]
    mask = np.isclose(points[:, ax], plane.value, atol=atol)
    if include_extent and plane.extent is not None:
        other = [a for a in range(3) if a != ax]
        for (lo, hi), a in zip(plane.extent, other):
            mask &= (points[:, a] >= lo - atol) & (points[:, a] <= hi + atol)
    return mask


def _fracture_from_faces(mesh, fracture_planes):
    face_ids, n_plus, pos_cell, g = [], [], [], []
    centers = mesh.face_center
    for plane in fracture_planes:
        ax = _AXES[plane.axis]
        axis_normal = np.abs(mesh.face_normal[:, ax]) > 1 - 1e-9
        mask = _on_plane(centers, plane) & axis_normal
        for f in np.flatnonzero(mask):
            cells = mesh.cells_of_face[f]
            if len(cells) != 2:
                raise MeshError(
                    f"fracture face {f} of plane {plane.axis}={plane.value} "
                    "is on the domain boundary"
                )
            # all loop vertices must lie on the plane too
            if not _on_plane(mesh.vertices[mesh.face_loops[f]], plane).all():
                continue
            K = max(cells, key=lambda c: mesh.cell_center[c][ax])
            i = mesh.cell_faces[K].index(f)
            sign = mesh.cell_face_sign[K][i]
            face_ids.append(f)
            n_plus.append(sign * mesh.face_normal[f])
            pos_cell.append(K)
            g.append(plane.g)
    if not face_ids:
        return FractureNetwork.empty()
    return FractureNetwork(
        np.array(face_ids), np.array(n_plus), np.array(pos_cell), np.array(g)
    )


def build_cartesian(n, domain=((-1, 1), (-1, 1), (-1, 1)), fracture_planes=()):
    """Uniform n x n x n Cartesian mesh of an axis-aligned box.

    Fracture planes must coincide with grid planes; a non-compliant plane
    is rejected with a diagnostic.
    """
    axes = [_grid_coords(n, lo, hi) for lo, hi in domain]
    for plane in fracture_planes:
        _check_plane_compliance(plane, axes, domain)
    nv = n + 1
    vid = lambda i, j, k: (i * nv + j) * nv + k
    X, Y, Z = np.meshgrid(axes[0], axes[1], axes[2], indexing="ij")
    vertices = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    cells = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                c = [
                    vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k),
                    vid(i, j + 1, k), vid(i, j, k + 1), vid(i + 1, j, k + 1),
                    vid(i + 1, j + 1, k + 1), vid(i, j + 1, k + 1),
                ]
                # outward-oriented quad loops of the hexahedron
                cells.append([
                    [c[0], c[3], c[2], c[1]],  # bottom (z-)
                    [c[4], c[5], c[6], c[7]],  # top (z+)
                    [c[0], c[1], c[5], c[4]],  # y-
                    [c[2], c[3], c[7], c[6]],  # y+
                    [c[0], c[4], c[7], c[3]],  # x-
                    [c[1], c[2], c[6], c[5]],  # x+
                ])
    mesh = PolyMesh.from_cell_loops(vertices, cells)
    return mesh, _fracture_from_faces(mesh, fracture_planes)


_KUHN_PERMS = [
    (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0),
]


def build_tetrahedral(n, domain=((-1, 1), (-1, 1), (-1, 1)), fracture_planes=()):
    """Kuhn subdivision of the Cartesian mesh: 6 tetrahedra per cube.

    The subdivision is translation-invariant, so triangles on shared cube
    faces match between neighbours.
    """
    axes = [_grid_coords(n, lo, hi) for lo, hi in domain]
    for plane in fracture_planes:
        _check_plane_compliance(plane, axes, domain)
    nv = n + 1
    vid = lambda i, j, k: (i * nv + j) * nv + k
    X, Y, Z = np.meshgrid(axes[0], axes[1], axes[2], indexing="ij")
    vertices = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    cells = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                base = np.array([i, j, k])
                for perm in _KUHN_PERMS:
                    steps = [base.copy()]
                    for ax in perm:
                        nxt = steps[-1].copy()
                        nxt[ax] += 1
                        steps.append(nxt)
                    ids = [vid(*p) for p in steps]
                    p = vertices[ids]
                    # orient so that (p1-p0, p2-p0, p3-p0) is right-handed
                    if np.dot(np.cross(p[1] - p[0], p[2] - p[0]), p[3] - p[0]) < 0:
                        ids[2], ids[3] = ids[3], ids[2]
                    a, b, c, d = ids
                    cells.append([
                        [a, c, b], [a, b, d], [b, c, d], [a, d, c],
                    ])
    mesh = PolyMesh.from_cell_loops(vertices, cells)
    return mesh, _fracture_from_faces(mesh, fracture_planes)


def build_hexacut(
    n,
    domain=((-1, 1), (-1, 1), (-1, 1)),
    fracture_planes=(),
    seed=0,
    magnitude=0.25,
):
    """Randomly perturbed Cartesian mesh with non-planar quads cut in two.

    Interior vertices not on any fracture plane are displaced by a seeded
    uniform offset in a cube of side ``2 * magnitude * spacing``; vertices
    on the domain boundary or on a fracture plane stay put.  Each
    non-planar quad is replaced by two triangles along its shorter
    diagonal.
    """
    if not 0 <= magnitude < 0.3:
        raise MeshError("perturbation magnitude must lie in [0, 0.3)")
    axes = [_grid_coords(n, lo, hi) for lo, hi in domain]
    for plane in fracture_planes:
        _check_plane_compliance(plane, axes, domain)
    base_mesh, _ = build_cartesian(n, domain, fracture_planes=())
    vertices = base_mesh.vertices.copy()
    spacing = np.array([(hi - lo) / n for lo, hi in domain])

    frozen = np.zeros(len(vertices), dtype=bool)
    for ax, (lo, hi) in enumerate(domain):
        frozen |= np.isclose(vertices[:, ax], lo, atol=1e-12)
        frozen |= np.isclose(vertices[:, ax], hi, atol=1e-12)
    for plane in fracture_planes:
        frozen |= _on_plane(vertices, plane, include_extent=False)

    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-1.0, 1.0, size=vertices.shape) * magnitude * spacing
    vertices[~frozen] += offsets[~frozen]

    def split_if_nonplanar(loop):
        coords = vertices[loop]
        if len(loop) == 3:
            return [loop]
        nrm = _newell_normal(coords)
        center = coords.mean(axis=0)
        off = np.abs((coords - center) @ nrm).max()
        if off <= 1e-12 * max(_diameter(coords), 1.0):
            return [loop]
        d02 = np.linalg.norm(coords[0] - coords[2])
        d13 = np.linalg.norm(coords[1] - coords[3])
        if d02 <= d13:
            return [[loop[0], loop[1], loop[2]], [loop[0], loop[2], loop[3]]]
        return [[loop[1], loop[2], loop[3]], [loop[1], loop[3], loop[0]]]

    cells = []
    for K in range(base_mesh.n_cells):
        loops = []
        for f, sign in zip(base_mesh.cell_faces[K], base_mesh.cell_face_sign[K]):
            loop = base_mesh.face_loops[f]
            if sign < 0:
                loop = loop[::-1]
            loops.extend(split_if_nonplanar(loop))
        cells.append(loops)
    try:
        mesh = PolyMesh.from_cell_loops(vertices, cells)
    except MeshError as exc:
        raise MeshError(f"perturbation produced a degenerate cell: {exc}") from exc
    _check_star_shaped(mesh)
    return mesh, _fracture_from_faces(mesh, fracture_planes)


def _check_star_shaped(mesh):
    for K in range(mesh.n_cells):
        c = mesh.cell_center[K]
        for a, b, d in mesh.cell_boundary_triangles(K):
            if np.dot(np.cross(a - c, b - c), d - c) <= 0:
                raise MeshError(
                    f"cell {K} is not star-shaped with respect to its barycenter"
                )


# ----------------------------------------------------------------------
# side classification
# ----------------------------------------------------------------------


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _entity_classes(cells, shared_faces, mesh, fracture):
    """Connected components of incident cells linked by non-fracture faces."""
    uf = _UnionFind(cells)
    for f in shared_faces:
        if fracture.is_fracture_face(f):
            continue
        cf = mesh.cells_of_face[f]
        if len(cf) == 2:
            uf.union(cf[0], cf[1])
    groups = {}
    for c in cells:
        groups.setdefault(uf.find(c), []).append(c)
    return sorted(tuple(sorted(g)) for g in groups.values())


def classify_fracture_sides(mesh, fracture):
    """Partition cells around each vertex/edge/face into fracture sides.

    Two cells around an entity are on the same side iff they are connected
    through a chain of shared non-fracture faces containing the entity.
    Entities away from the fracture network get a single class.
    """
    vertex_classes = []
    for s in range(mesh.n_vertices):
        vertex_classes.append(
            _entity_classes(
                mesh.cells_of_vertex[s], mesh.faces_of_vertex[s], mesh, fracture
            )
        )
    edge_classes = []
    for e in range(mesh.n_edges):
        edge_classes.append(
            _entity_classes(
                mesh.cells_of_edge[e], mesh.faces_of_edge[e], mesh, fracture
            )
        )
    face_sides = []
    for f in range(mesh.n_faces):
        cells = mesh.cells_of_face[f]
        if fracture.is_fracture_face(f):
            face_sides.append([(c,) for c in sorted(cells)])
        else:
            face_sides.append([tuple(sorted(cells))])
    return SideClasses(vertex_classes, edge_classes, face_sides)


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    issues: list

    def __bool__(self):
        return self.ok


def validate(mesh, fracture=None):
    """Check the mesh invariants; returns a report, never raises."""
    issues = []
    for f, loop in enumerate(mesh.face_loops):
        if len(set(loop)) != len(loop):
            issues.append(("face", f, "non-simple loop (repeated vertex)"))
    for f in range(mesh.n_faces):
        coords = mesh.vertices[mesh.face_loops[f]]
        off = np.abs((coords - mesh.face_center[f]) @ mesh.face_normal[f]).max()
        if off > 1e-12 * max(mesh.face_diam[f], 1.0):
            issues.append(("face", f, f"non-planar (offset {off:.3e})"))
    for f in range(mesh.n_faces):
        nc = len(mesh.cells_of_face[f])
        if nc not in (1, 2):
            issues.append(("face", f, f"incident to {nc} cells"))
    for K in range(mesh.n_cells):
        closure = np.zeros(3)
        for f, sign in zip(mesh.cell_faces[K], mesh.cell_face_sign[K]):
            closure += sign * mesh.face_area[f] * mesh.face_normal[f]
        if np.linalg.norm(closure) > 1e-12 * mesh.cell_diam[K] ** 2 * 10:
            issues.append(
                ("cell", K, f"face closure violated (|sum| = "
                 f"{np.linalg.norm(closure):.3e})")
            )
        # volume by divergence theorem vs tet-fan decomposition
        vol_div = 0.0
        for f, sign in zip(mesh.cell_faces[K], mesh.cell_face_sign[K]):
            vol_div += (
                sign * mesh.face_area[f]
                * np.dot(mesh.face_center[f], mesh.face_normal[f]) / 3.0
            )
        if abs(vol_div - mesh.cell_volume[K]) > 1e-12 * max(
            mesh.cell_volume[K], 1.0
        ) * 10:
            issues.append(
                ("cell", K, f"volume mismatch (div {vol_div:.15e} vs fan "
                 f"{mesh.cell_volume[K]:.15e})")
            )
    if fracture is not None:
        for i, f in enumerate(fracture.face_ids):
            if len(mesh.cells_of_face[f]) != 2:
                issues.append(("fracture", int(f), "fracture face not interior"))
                continue
            K = fracture.pos_cell[i]
            j = mesh.cell_faces[K].index(f)
            n_out = mesh.cell_face_sign[K][j] * mesh.face_normal[f]
            if np.linalg.norm(n_out - fracture.n_plus[i]) > 1e-12:
                issues.append(
                    ("fracture", int(f), "n_plus does not match the outward "
                     "normal of the positive cell")
                )
    return ValidationReport(not issues, issues)


# ----------------------------------------------------------------------
# POLYMESH v1 text format
# ----------------------------------------------------------------------


def write_polymesh(path, mesh, fracture=None):
    """Write a mesh (and optional fracture network) in POLYMESH v1 format."""
    fracture = fracture if fracture is not None else FractureNetwork.empty()
    with open(path, "w") as fh:
        fh.write("POLYMESH 1\n")
        fh.write(f"VERTICES {mesh.n_vertices}\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        fh.write(f"FACES {mesh.n_faces}\n")
        for loop in mesh.face_loops:
            fh.write(f"{len(loop)} " + " ".join(map(str, loop)) + "\n")
        fh.write(f"CELLS {mesh.n_cells}\n")
        for fids, signs in zip(mesh.cell_faces, mesh.cell_face_sign):
            toks = [f"-{f}" if s < 0 else f"{f}" for f, s in zip(fids, signs)]
            fh.write(f"{len(fids)} " + " ".join(toks) + "\n")
        fh.write(f"FRACTURE {fracture.n_faces}\n")
        for i in range(fracture.n_faces):
            n = fracture.n_plus[i]
            fh.write(
                f"{fracture.face_ids[i]} {n[0]:.17g} {n[1]:.17g} {n[2]:.17g} "
                f"{fracture.pos_cell[i]} {fracture.g[i]:.17g}\n"
            )


def read_polymesh(path):
    """Read a POLYMESH v1 file; returns (mesh, fracture)."""
    with open(path) as fh:
        tokens = fh.read().split("\n")
    lines = [ln.split() for ln in tokens if ln.strip()]
    it = iter(lines)
    header = next(it)
    if header != ["POLYMESH", "1"]:
        raise MeshError(f"bad POLYMESH header: {' '.join(header)}")

    def section(name):
        ln = next(it)
        if ln[0] != name:
            raise MeshError(f"expected section {name}, got {ln[0]}")
        return int(ln[1])

    nv = section("VERTICES")
    vertices = np.array([[float(x) for x in next(it)] for _ in range(nv)])
    nf = section("FACES")
    face_loops = []
    for _ in range(nf):
        ln = next(it)
        k = int(ln[0])
        face_loops.append([int(x) for x in ln[1 : 1 + k]])
    nc = section("CELLS")
    cell_faces, cell_sign = [], []
    for _ in range(nc):
        ln = next(it)
        k = int(ln[0])
        fids, signs = [], []
        for tok in ln[1 : 1 + k]:
            if tok.startswith("-"):
                fids.append(int(tok[1:]))
                signs.append(-1)
            else:
                fids.append(int(tok))
                signs.append(1)
        cell_faces.append(fids)
        cell_sign.append(signs)
    mesh = PolyMesh(vertices, face_loops, cell_faces, cell_sign)
    nfr = section("FRACTURE")
    if nfr == 0:
        return mesh, FractureNetwork.empty()
    fids, nplus, pos, g = [], [], [], []
    for _ in range(nfr):
        ln = next(it)
        fids.append(int(ln[0]))
        nplus.append([float(ln[1]), float(ln[2]), float(ln[3])])
        pos.append(int(ln[4]))
        g.append(float(ln[5]))
    fracture = FractureNetwork(
        np.array(fids), np.array(nplus), np.array(pos), np.array(g)
    )
    return mesh, fracture
