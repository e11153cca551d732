"""Discrete displacement space: DOF map, reconstructions, interpolator.

DOFs are one R3 vector per vertex side-class, edge side-class, face side,
and cell.  Each cell carries local reconstruction operators expressed as
dense matrices acting on the local scalar DOF vector (one scalar per
entity; the three vector components decouple for every reconstruction).
"""

from __future__ import annotations

import numpy as np

from . import poly
from .mesh import MeshError
from .poly import MonomialBasis, cell_quadrature, edge_quadrature, face_quadrature

__all__ = [
    "DofMap",
    "CellOperators",
    "build_cell_operators",
    "build_all_operators",
    "interpolate",
    "jump_coeffs",
]


class DofMap:
    """Global numbering of side-aware DOF entities.

    Entity blocks are ordered: all vertex classes, then edge classes, then
    face sides, then cells.  Each entity owns 3 scalar DOFs (components
    interleaved): vector DOF ``3 * entity + comp``.
    """

    def __init__(self, mesh, sides, fracture):
        self.mesh = mesh
        self.sides = sides
        self.fracture = fracture
        self._vertex_entity = {}
        self._edge_entity = {}
        self._face_entity = {}
        self._cell_entity = {}
        kinds, ids, reps, bdry = [], [], [], []

        def add(kind, eid, rep, on_bdry):
            idx = len(kinds)
            kinds.append(kind)
            ids.append(eid)
            reps.append(rep)
            bdry.append(on_bdry)
            return idx

        for s in range(mesh.n_vertices):
            for cls in sides.vertex_classes[s]:
                idx = add("vertex", s, cls[0], bool(mesh.vertex_on_boundary[s]))
                for K in cls:
                    self._vertex_entity[(s, K)] = idx
        self.n_vertex_classes = len(kinds)
        for e in range(mesh.n_edges):
            for cls in sides.edge_classes[e]:
                idx = add("edge", e, cls[0], bool(mesh.edge_on_boundary[e]))
                for K in cls:
                    self._edge_entity[(e, K)] = idx
        self.n_edge_classes = len(kinds) - self.n_vertex_classes
        for f in range(mesh.n_faces):
            for cls in sides.face_sides[f]:
                idx = add("face", f, cls[0], bool(mesh.face_on_boundary[f]))
                for K in cls:
                    self._face_entity[(f, K)] = idx
        self.n_face_sides = (
            len(kinds) - self.n_vertex_classes - self.n_edge_classes
        )
        for K in range(mesh.n_cells):
            self._cell_entity[K] = add("cell", K, K, False)
        self.n_entities = len(kinds)
        self.entity_kind = kinds
        self.entity_id = np.array(ids, dtype=int)
        self.entity_rep = np.array(reps, dtype=int)
        self.entity_boundary = np.array(bdry, dtype=bool)
        self.n_dofs = 3 * self.n_entities
        self.dof_boundary = np.repeat(self.entity_boundary, 3)
        self.free = np.flatnonzero(~self.dof_boundary)
        self._cell_ents_cache = [None] * mesh.n_cells

    @property
    def n_free(self):
        return len(self.free)

    def vertex_entity(self, s, K):
        return self._vertex_entity[(s, K)]

    def edge_entity(self, e, K):
        return self._edge_entity[(e, K)]

    def face_entity(self, f, K):
        return self._face_entity[(f, K)]

    def cell_entity(self, K):
        return self._cell_entity[K]

    def cell_entities(self, K):
        """Entity indices in local cell order (vertices, edges, faces, cell)."""
        cached = self._cell_ents_cache[K]
        if cached is not None:
            return cached
        mesh = self.mesh
        ents = [self._vertex_entity[(s, K)] for s in mesh.cell_vertices(K)]
        ents += [self._edge_entity[(e, K)] for e in mesh.cell_edges(K)]
        ents += [self._face_entity[(f, K)] for f in mesh.cell_faces[K]]
        ents.append(self._cell_entity[K])
        ents = np.array(ents, dtype=int)
        self._cell_ents_cache[K] = ents
        return ents

    def cell_dofs(self, K):
        """Vector DOF indices for a cell, components interleaved."""
        ents = self.cell_entities(K)
        return (3 * ents[:, None] + np.arange(3)[None, :]).ravel()

    def local_scalar(self, vec, K, comp):
        """Extract the local scalar DOF vector of one component."""
        return vec[3 * self.cell_entities(K) + comp]


class CellOperators:
    """Per-cell reconstruction matrices on the local scalar DOF vector.

    Attributes (nsloc = #local scalar DOFs):

    - ``edge_recon[i]``: (3, nsloc) coefficients in the edge basis
      {1, t, (3 t^2 - 1)/2} on t in [-1, 1] along the (sorted) edge.
    - ``face_grad[i]``: (3, 3, nsloc) gradient of the scalar field on face
      i: spatial component d, face P1 basis j.
    - ``face_pot[i]``: (6, nsloc) quadratic face displacement coefficients.
    - ``cell_grad``: (3, 4, nsloc); ``cell_pot``: (10, nsloc).
    - ``stab``: (nsloc, nsloc) scalar stabilization Gram matrix.
    """

    __slots__ = (
        "K", "nsloc", "vertices", "edges", "faces", "face_signs",
        "vslot", "eslot", "fslot", "cslot",
        "edge_recon", "edge_points", "face_grad", "face_pot",
        "cell_grad", "cell_pot", "stab",
        "face_basis2", "cell_basis1", "cell_basis2",
        "cell_quad", "face_quads", "gram_c1",
    )


def _edge_basis_at(t):
    t = np.asarray(t, dtype=float)
    return np.column_stack([np.ones_like(t), t, 0.5 * (3.0 * t * t - 1.0)])


def build_cell_operators(mesh, K, order=poly.DEFAULT_ORDER,
                         stab_face_scale=1.0):
    """Assemble all local reconstruction operators of one cell.

    ``stab_face_scale`` multiplies the face mismatch term of the
    stabilization; any value other than 1 breaks the definition and is
    meant only for fault-injection in the self-check suite.
    """
    op = CellOperators()
    op.K = K
    verts = mesh.cell_vertices(K)
    edges = mesh.cell_edges(K)
    faces = mesh.cell_faces[K]
    signs = mesh.cell_face_sign[K]
    nV, nE, nF = len(verts), len(edges), len(faces)
    ns = nV + nE + nF + 1
    op.nsloc = ns
    op.vertices, op.edges, op.faces, op.face_signs = verts, edges, faces, signs
    op.vslot = {s: i for i, s in enumerate(verts)}
    op.eslot = {e: nV + i for i, e in enumerate(edges)}
    op.fslot = {f: nV + nE + i for i, f in enumerate(faces)}
    op.cslot = ns - 1

    # ------------------------------------------------------------------
    # edge reconstructions: endpoint values + mean fix a quadratic
    # ------------------------------------------------------------------
    op.edge_recon = []
    op.edge_points = []
    edge_quads = {}
    for e in edges:
        a, b = mesh.edges[e]
        R = np.zeros((3, ns))
        R[0, op.eslot[e]] = 1.0
        R[1, op.vslot[a]] = -0.5
        R[1, op.vslot[b]] = 0.5
        R[2, op.vslot[a]] = 0.5
        R[2, op.vslot[b]] = 0.5
        R[2, op.eslot[e]] = -1.0
        op.edge_recon.append(R)
        op.edge_points.append((mesh.vertices[a], mesh.vertices[b]))
        edge_quads[e] = edge_quadrature(
            mesh.vertices[a], mesh.vertices[b], order
        )

    def edge_vals_at(e, points):
        """Edge reconstruction values at points on edge e: (npts, nsloc)."""
        i = edges.index(e)
        p0, p1 = op.edge_points[i]
        mid = 0.5 * (p0 + p1)
        half = 0.5 * (p1 - p0)
        t = (points - mid) @ half / (half @ half)
        return _edge_basis_at(t) @ op.edge_recon[i]

    # ------------------------------------------------------------------
    # face gradient and potential
    # ------------------------------------------------------------------
    op.face_grad = []
    op.face_pot = []
    op.face_basis2 = []
    op.face_quads = []
    for f in faces:
        b1 = MonomialBasis.for_face(mesh, f, 1)
        b2 = MonomialBasis.for_face(mesh, f, 2)
        fq = face_quadrature(mesh, f, order)
        op.face_basis2.append(b2)
        op.face_quads.append(fq)
        w = fq.weights
        phi1 = b1.eval(fq.points)
        phi2 = b2.eval(fq.points)
        gram1 = phi1.T @ (w[:, None] * phi1)
        gram2 = phi2.T @ (w[:, None] * phi2)
        grad1 = b1.eval_grad(fq.points)  # (npts, 3, 3) in-plane gradients

        loop = mesh.face_loops[f]
        edge_norms = mesh.edge_outward_normals(f)
        loop_edges = mesh.face_edges[f]

        # gradient: for each spatial component d, solve the P1 Gram system
        rhs_g = np.zeros((3, 3, ns))
        for j in range(3):
            int_grad = w @ grad1[:, j, :]  # (3,) integral of grad m_j
            rhs_g[:, j, op.fslot[f]] -= int_grad
        for i, e in enumerate(loop_edges):
            eq = edge_quads[e]
            ev = edge_vals_at(e, eq.points)  # (npts_e, ns)
            m1e = b1.eval(eq.points)  # (npts_e, 3)
            contrib = m1e.T @ (eq.weights[:, None] * ev)  # (3, ns)
            n_se = edge_norms[i]
            for d in range(3):
                rhs_g[d] += n_se[d] * contrib
        Gf = np.stack([np.linalg.solve(gram1, rhs_g[d]) for d in range(3)])
        op.face_grad.append(Gf)

        # potential: div of (x - center) q scales centered monomials
        degs2 = b2.degrees()
        M = (2.0 + degs2)[:, None] * gram2
        rel = fq.points - b2.center
        gvals = np.einsum("pj,djn->pdn", phi1, Gf)  # (npts, 3, ns)
        rhs_p = -np.einsum("p,pd,pj,pdn->jn", w, rel, phi2, gvals)
        for i, e in enumerate(loop_edges):
            eq = edge_quads[e]
            ev = edge_vals_at(e, eq.points)
            m2e = b2.eval(eq.points)  # (npts_e, 6)
            fac = (eq.points - b2.center) @ edge_norms[i]
            rhs_p += m2e.T @ ((eq.weights * fac)[:, None] * ev)
        op.face_pot.append(np.linalg.solve(M, rhs_p))

    # ------------------------------------------------------------------
    # cell gradient and potential
    # ------------------------------------------------------------------
    c1 = MonomialBasis.for_cell(mesh, K, 1)
    c2 = MonomialBasis.for_cell(mesh, K, 2)
    cq = cell_quadrature(mesh, K, order)
    op.cell_basis1, op.cell_basis2, op.cell_quad = c1, c2, cq
    wc = cq.weights
    psi1 = c1.eval(cq.points)
    psi2 = c2.eval(cq.points)
    gram_c1 = psi1.T @ (wc[:, None] * psi1)
    gram_c2 = psi2.T @ (wc[:, None] * psi2)
    op.gram_c1 = gram_c1
    grad_c1 = c1.eval_grad(cq.points)  # (npts, 4, 3)

    rhs_g = np.zeros((3, 4, ns))
    for j in range(4):
        int_grad = wc @ grad_c1[:, j, :]
        rhs_g[:, j, op.cslot] -= int_grad
    face_p2_at_fq = []
    for i, f in enumerate(faces):
        fq = op.face_quads[i]
        phi2f = op.face_basis2[i].eval(fq.points)
        face_p2_at_fq.append(phi2f)
        pot_vals = phi2f @ op.face_pot[i]  # (npts_f, ns)
        m1f = c1.eval(fq.points)  # (npts_f, 4)
        n_K = signs[i] * mesh.face_normal[f]
        contrib = m1f.T @ (fq.weights[:, None] * pot_vals)  # (4, ns)
        for d in range(3):
            rhs_g[d] += n_K[d] * contrib
    GK = np.empty((3, 4, ns))
    for d in range(3):
        GK[d] = np.linalg.solve(gram_c1, rhs_g[d])
    op.cell_grad = GK

    degs2 = c2.degrees()
    M = (3.0 + degs2)[:, None] * gram_c2
    relc = cq.points - c2.center
    gvals = np.einsum("pj,djn->pdn", psi1, GK)
    rhs_p = -np.einsum("p,pd,pj,pdn->jn", wc, relc, psi2, gvals)
    for i, f in enumerate(faces):
        fq = op.face_quads[i]
        pot_vals = face_p2_at_fq[i] @ op.face_pot[i]
        m2f = c2.eval(fq.points)
        n_K = signs[i] * mesh.face_normal[f]
        fac = (fq.points - c2.center) @ n_K
        rhs_p += m2f.T @ ((fq.weights * fac)[:, None] * pot_vals)
    op.cell_pot = np.linalg.solve(M, rhs_p)

    # ------------------------------------------------------------------
    # stabilization: face, edge, and vertex mismatch terms
    # ------------------------------------------------------------------
    hK = mesh.cell_diam[K]
    S = np.zeros((ns, ns))
    for i, f in enumerate(faces):
        fq = op.face_quads[i]
        diff = c2.eval(fq.points) @ op.cell_pot - face_p2_at_fq[i] @ op.face_pot[i]
        S += stab_face_scale * (diff.T @ (fq.weights[:, None] * diff)) / hK
    for i, e in enumerate(edges):
        eq = edge_quads[e]
        diff = c2.eval(eq.points) @ op.cell_pot - _edge_basis_at(
            _edge_param(op.edge_points[i], eq.points)
        ) @ op.edge_recon[i]
        S += diff.T @ (eq.weights[:, None] * diff)
    for s in verts:
        d = (c2.eval(mesh.vertices[s][None, :]) @ op.cell_pot)[0]
        d[op.vslot[s]] -= 1.0
        S += hK * np.outer(d, d)
    op.stab = S
    return op


def _edge_param(endpoints, points):
    p0, p1 = endpoints
    mid = 0.5 * (p0 + p1)
    half = 0.5 * (p1 - p0)
    return (points - mid) @ half / (half @ half)


def edge_reconstruction_values(op, local_edge, points, local_scalar):
    """Evaluate the edge quadratic of one scalar component at points."""
    t = _edge_param(op.edge_points[local_edge], points)
    return _edge_basis_at(t) @ (op.edge_recon[local_edge] @ local_scalar)


def build_all_operators(mesh, order=poly.DEFAULT_ORDER, stab_face_scale=1.0):
    return [build_cell_operators(mesh, K, order, stab_face_scale)
            for K in range(mesh.n_cells)]


# ----------------------------------------------------------------------
# interpolation
# ----------------------------------------------------------------------


def _side_of_entity(dofmap, idx, side_of):
    if side_of is None:
        return 0
    rep = dofmap.entity_rep[idx]
    return side_of(dofmap.mesh.cell_center[rep][None, :])[0]


def interpolate(mesh, dofmap, field, side_of=None, ops=None,
                order=poly.DEFAULT_ORDER):
    """DOF interpolation of a (possibly two-sided) displacement field.

    ``field(points, side)`` returns an (npts, 3) array; ``side_of`` maps
    points to the fracture side (+1/-1) and is applied to the barycenter
    of each entity's representative cell.  Vertex DOFs are point values,
    edge and face DOFs are mean values, and the cell DOF is the cell mean
    plus a correction making the interpolator commute with the divergence.
    """
    vec = np.zeros(dofmap.n_dofs)
    mesh_ = mesh
    for idx in range(dofmap.n_entities):
        kind = dofmap.entity_kind[idx]
        eid = dofmap.entity_id[idx]
        side = _side_of_entity(dofmap, idx, side_of)
        if kind == "vertex":
            vals = field(mesh_.vertices[eid][None, :], side)[0]
        elif kind == "edge":
            a, b = mesh_.edges[eid]
            eq = edge_quadrature(mesh_.vertices[a], mesh_.vertices[b], order)
            vals = eq.weights @ field(eq.points, side) / eq.weights.sum()
        elif kind == "face":
            fq = face_quadrature(mesh_, eid, order)
            vals = fq.weights @ field(fq.points, side) / mesh_.face_area[eid]
        else:
            continue
        vec[3 * idx : 3 * idx + 3] = vals

    # cell DOFs: mean value plus the divergence-conformity correction
    if ops is None:
        ops = [None] * mesh_.n_cells
    for K in range(mesh_.n_cells):
        op = ops[K] or build_cell_operators(mesh_, K, order)
        side = 0 if side_of is None else side_of(mesh_.cell_center[K][None, :])[0]
        cq = op.cell_quad
        uvals = field(cq.points, side)
        mean = cq.weights @ uvals / mesh_.cell_volume[K]
        corr = np.zeros(3)
        ents = dofmap.cell_entities(K)
        for i, f in enumerate(op.faces):
            fq = op.face_quads[i]
            phi2 = op.face_basis2[i].eval(fq.points)
            n_K = op.face_signs[i] * mesh_.face_normal[f]
            ufvals = field(fq.points, side)
            pot = np.empty_like(ufvals)
            for c in range(3):
                loc = vec[3 * ents + c]
                pot[:, c] = phi2 @ (op.face_pot[i] @ loc)
            mismatch = ((ufvals - pot) @ n_K) * fq.weights
            corr -= mismatch @ (fq.points - mesh_.cell_center[K])
        idx = dofmap.cell_entity(K)
        vec[3 * idx : 3 * idx + 3] = mean + corr / mesh_.cell_volume[K]
    return vec


# ----------------------------------------------------------------------
# jumps
# ----------------------------------------------------------------------


def jump_coeffs(mesh, fracture, dofmap, ops, vec, i):
    """Quadratic jump polynomial on the i-th fracture face.

    Returns (basis, coeffs) with coeffs of shape (6, 3): face P2 basis
    coefficients of the positive-side trace minus the negative-side trace.
    """
    f = fracture.face_ids[i]
    K, L = fracture.sides(mesh, i)
    opK, opL = ops[K], ops[L]
    iK = opK.faces.index(f)
    iL = opL.faces.index(f)
    entsK = dofmap.cell_entities(K)
    entsL = dofmap.cell_entities(L)
    coeffs = np.empty((6, 3))
    for c in range(3):
        cK = opK.face_pot[iK] @ vec[3 * entsK + c]
        cL = opL.face_pot[iL] @ vec[3 * entsL + c]
        coeffs[:, c] = cK - cL
    return opK.face_basis2[iK], coeffs


def mean_jump(mesh, fracture, dofmap, vec, i):
    """Face-mean jump: difference of the two face-side DOF vectors."""
    f = fracture.face_ids[i]
    K, L = fracture.sides(mesh, i)
    eK = dofmap.face_entity(f, K)
    eL = dofmap.face_entity(f, L)
    return vec[3 * eK : 3 * eK + 3] - vec[3 * eL : 3 * eL + 3]
