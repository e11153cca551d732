"""Global assembly of the stabilized elasticity system.

Builds the energy matrix (stress bilinear form plus stabilization), the
fracture-face multiplier coupling, and the load vector, and applies
Dirichlet boundary data by lifting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .poly import DEFAULT_ORDER

__all__ = [
    "MaterialParams",
    "SystemBlocks",
    "local_stiffness",
    "assemble",
    "apply_dirichlet",
    "export_coo",
]


@dataclass(frozen=True)
class MaterialParams:
    """Isotropic elastic material with a stabilization weight.

    ``G`` and ``L`` are the shear and second Lame coefficients; ``mu1``
    defaults to ``E / (1 + nu) = 2 G``.
    """

    E: float
    nu: float
    mu1: float = None

    def __post_init__(self):
        if self.E <= 0:
            raise ValueError("Young modulus must be positive")
        if not 0 <= self.nu < 0.5:
            raise ValueError("Poisson ratio must lie in [0, 0.5)")
        if self.mu1 is None:
            object.__setattr__(self, "mu1", self.E / (1.0 + self.nu))
        if self.mu1 <= 0:
            raise ValueError("stabilization weight must be positive")

    @property
    def G(self):
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def L(self):
        return self.nu * self.E / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))

    @classmethod
    def from_lame(cls, G, L, mu1=None):
        nu = L / (2.0 * (L + G))
        E = 2.0 * G * (1.0 + nu)
        return cls(E, nu, mu1)


def local_stiffness(mesh, K, op, params):
    """Dense local matrix of the stress form plus stabilization.

    Vector DOFs are interleaved (3 components per local entity).  The
    stress term is ``2 G int eps:eps + L int div div`` built from the cell
    gradient reconstruction; the stabilization is weighted by ``mu1``.
    """
    ns = op.nsloc
    Gm = op.gram_c1
    Gs = op.cell_grad  # (3, 4, ns)
    T = np.einsum("djn,jk,ekm->denm", Gs, Gm, Gs)  # T[d, e] = Gs_d' Gm Gs_e
    Kloc = np.zeros((3 * ns, 3 * ns))
    G, L, mu1 = params.G, params.L, params.mu1
    sumTdd = T[0, 0] + T[1, 1] + T[2, 2]
    idx = [np.arange(c, 3 * ns, 3) for c in range(3)]
    for c in range(3):
        for d in range(3):
            block = 0.5 * T[d, c] + L / (2.0 * G) * T[c, d]
            if c == d:
                block = block + 0.5 * sumTdd
            Kloc[np.ix_(idx[c], idx[d])] += 2.0 * G * block
    for c in range(3):
        Kloc[np.ix_(idx[c], idx[c])] += mu1 * op.stab
    return Kloc


@dataclass
class SystemBlocks:
    """Assembled sparse blocks of the contact problem.

    ``A``: energy matrix on all displacement DOFs; ``B``: multiplier
    coupling with one 3-row block per fracture face acting as
    ``|sigma| (v_K - v_L)`` on the two face-side DOF blocks; ``F``: load.
    """

    A: sp.csr_matrix
    B: sp.csr_matrix
    F: np.ndarray
    dofmap: object
    fracture: object
    params: MaterialParams
    dirichlet_values: np.ndarray = None
    free: np.ndarray = None

    @property
    def n_dofs(self):
        return self.A.shape[0]


def assemble(mesh, dofmap, ops, params, fracture, body_force=None,
             side_of=None):
    """Assemble energy matrix, multiplier coupling, and load vector."""
    rows, cols, vals = [], [], []
    n = dofmap.n_dofs
    F = np.zeros(n)
    for K in range(mesh.n_cells):
        op = ops[K]
        Kloc = local_stiffness(mesh, K, op, params)
        gdofs = dofmap.cell_dofs(K)
        rr, cc = np.meshgrid(gdofs, gdofs, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(Kloc.ravel())
        if body_force is not None:
            cq = op.cell_quad
            side = 0 if side_of is None else side_of(
                mesh.cell_center[K][None, :]
            )[0]
            fvals = body_force(cq.points, side)
            ce = dofmap.cell_entity(K)
            F[3 * ce : 3 * ce + 3] = cq.weights @ fvals
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()

    brows, bcols, bvals = [], [], []
    for i in range(fracture.n_faces):
        f = fracture.face_ids[i]
        K, Lc = fracture.sides(mesh, i)
        eK = dofmap.face_entity(f, K)
        eL = dofmap.face_entity(f, Lc)
        area = mesh.face_area[f]
        for c in range(3):
            brows += [3 * i + c, 3 * i + c]
            bcols += [3 * eK + c, 3 * eL + c]
            bvals += [area, -area]
    B = sp.coo_matrix(
        (bvals, (brows, bcols)), shape=(3 * fracture.n_faces, n)
    ).tocsr()
    return SystemBlocks(A=A, B=B, F=F, dofmap=dofmap, fracture=fracture,
                        params=params)


def apply_dirichlet(system, g_D=None, side_of=None, order=DEFAULT_ORDER):
    """Set boundary DOFs from the boundary field and lift to the RHS.

    ``g_D(points, side)`` is interpolated entity-wise (vertex values, edge
    and face means); returns the system with ``dirichlet_values`` and
    ``free`` filled in.
    """
    from .poly import edge_quadrature, face_quadrature

    dofmap = system.dofmap
    mesh = dofmap.mesh
    ub = np.zeros(dofmap.n_dofs)
    if g_D is not None:
        for idx in np.flatnonzero(dofmap.entity_boundary):
            kind = dofmap.entity_kind[idx]
            eid = dofmap.entity_id[idx]
            side = 0
            if side_of is not None:
                rep = dofmap.entity_rep[idx]
                side = side_of(mesh.cell_center[rep][None, :])[0]
            if kind == "vertex":
                vals = g_D(mesh.vertices[eid][None, :], side)[0]
            elif kind == "edge":
                a, b = mesh.edges[eid]
                eq = edge_quadrature(mesh.vertices[a], mesh.vertices[b], order)
                vals = eq.weights @ g_D(eq.points, side) / eq.weights.sum()
            else:
                fq = face_quadrature(mesh, eid, order)
                vals = fq.weights @ g_D(fq.points, side) / mesh.face_area[eid]
            ub[3 * idx : 3 * idx + 3] = vals
    system.dirichlet_values = ub
    system.free = dofmap.free
    return system


def reduced_system(system):
    """(A_ff, rhs_f) after Dirichlet elimination."""
    free = system.free
    bdry = np.flatnonzero(system.dofmap.dof_boundary)
    A_ff = system.A[free][:, free].tocsc()
    rhs = system.F[free] - system.A[free][:, bdry] @ system.dirichlet_values[bdry]
    return A_ff, rhs


def expand_solution(system, u_free):
    vec = system.dirichlet_values.copy()
    vec[system.free] = u_free
    return vec


def export_coo(path, A):
    """Write a sparse matrix as `i j value` text lines."""
    coo = A.tocoo()
    with open(path, "w") as fh:
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {v:.17g}\n")
