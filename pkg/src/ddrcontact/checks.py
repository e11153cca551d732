"""Self-check suite for the discrete operators and the assembled scheme.

Each check exercises a defining property of the method on small meshes of
every supported family (Cartesian hexahedra, Kuhn tetrahedra, randomly
perturbed cut hexahedra):

- mean identities: the face and cell means of the reconstructed
  potentials return the corresponding degrees of freedom;
- polynomial exactness: interpolating a quadratic field and
  reconstructing it (edge, face, and cell potentials, cell gradient)
  reproduces the field exactly;
- divergence commutation: the cell divergence of the interpolant has the
  same moments against linear fields as the divergence of the interpolated
  function;
- stabilization: the stabilization bilinear form matches an independent
  recomputation from its definition and annihilates interpolants of
  quadratics;
- patch test: the full solver reproduces a quadratic displacement field
  exactly, for compressible and nearly incompressible material.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import poly
from .assembly import MaterialParams, assemble, apply_dirichlet
from .contact import newton_solve
from .mesh import build_cartesian, build_tetrahedral, build_hexacut, \
    classify_fracture_sides
from .spaces import DofMap, build_all_operators, build_cell_operators, \
    edge_reconstruction_values, interpolate

__all__ = ["CheckResult", "run_all_checks"]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one self-check."""

    name: str
    max_error: float
    tol: float

    @property
    def passed(self):
        return self.max_error <= self.tol


def _check_meshes(order):
    """Small meshes covering all cell shapes, with operators and DOF maps."""
    out = []
    for name, (mesh, fr) in (
        ("cartesian", build_cartesian(1)),
        ("tetrahedral", build_tetrahedral(1)),
        ("hexacut", build_hexacut(2, seed=0, magnitude=0.25)),
    ):
        sides = classify_fracture_sides(mesh, fr)
        dofmap = DofMap(mesh, sides, fr)
        ops = build_all_operators(mesh, order)
        out.append((name, mesh, fr, dofmap, ops))
    return out


def _random_quadratic(rng):
    """Random vector-valued quadratic polynomial field, with its gradient."""
    c0 = rng.standard_normal(3)
    c1 = rng.standard_normal((3, 3))
    c2 = rng.standard_normal((3, 3, 3))
    c2 = 0.5 * (c2 + c2.transpose(0, 2, 1))

    def field(points, side=0):
        points = np.asarray(points)
        lin = points @ c1.T
        quad = np.einsum("pi,cij,pj->pc", points, c2, points)
        return c0 + lin + quad

    def grad(points):  # (npts, 3, 3): component c, direction d
        points = np.asarray(points)
        return c1[None, :, :] + 2.0 * np.einsum("cij,pj->pci", c2, points)

    return field, grad


def _random_cubic(rng):
    """Random vector-valued cubic polynomial field, with its divergence."""
    coeffs = []
    exps = [(i, j, k) for i in range(4) for j in range(4) for k in range(4)
            if i + j + k <= 3]
    for _ in range(3):
        coeffs.append({e: rng.standard_normal() for e in exps})

    def field(points, side=0):
        points = np.asarray(points)
        out = np.zeros((len(points), 3))
        for c in range(3):
            for (i, j, k), a in coeffs[c].items():
                out[:, c] += a * points[:, 0] ** i * points[:, 1] ** j \
                    * points[:, 2] ** k
        return out

    def div(points):
        points = np.asarray(points)
        out = np.zeros(len(points))
        for c, e in enumerate("xyz"):
            for (i, j, k), a in coeffs[c].items():
                p = [i, j, k]
                if p[c] == 0:
                    continue
                d = p[c]
                p[c] -= 1
                out += a * d * points[:, 0] ** p[0] * points[:, 1] ** p[1] \
                    * points[:, 2] ** p[2]
        return out

    return field, div


def check_mean_identities(order=poly.DEFAULT_ORDER, n_samples=20, seed=0):
    """Face and cell means of the potentials return the DOFs themselves."""
    rng = np.random.default_rng(seed)
    err = 0.0
    for _name, mesh, _fr, dofmap, ops in _check_meshes(order):
        for K in range(mesh.n_cells):
            op = ops[K]
            for _ in range(n_samples):
                loc = rng.standard_normal(op.nsloc)
                for i, f in enumerate(op.faces):
                    fq = op.face_quads[i]
                    pot = op.face_basis2[i].eval(fq.points) @ \
                        (op.face_pot[i] @ loc)
                    mean = fq.weights @ pot / mesh.face_area[f]
                    err = max(err, abs(mean - loc[op.fslot[f]]))
                cq = op.cell_quad
                pot = op.cell_basis2.eval(cq.points) @ (op.cell_pot @ loc)
                mean = cq.weights @ pot / mesh.cell_volume[K]
                err = max(err, abs(mean - loc[op.cslot]))
    return CheckResult("mean identities", err, 1e-10)


def check_polynomial_exactness(order=poly.DEFAULT_ORDER, n_samples=20,
                               seed=0):
    """Reconstructions of interpolated quadratics reproduce them exactly."""
    rng = np.random.default_rng(seed)
    err = 0.0
    for _name, mesh, _fr, dofmap, ops in _check_meshes(order):
        for _ in range(n_samples):
            field, grad = _random_quadratic(rng)
            vec = interpolate(mesh, dofmap, field, ops=ops, order=order)
            for K in range(mesh.n_cells):
                op = ops[K]
                ents = dofmap.cell_entities(K)
                cq = op.cell_quad
                psi2 = op.cell_basis2.eval(cq.points)
                psi1 = op.cell_basis1.eval(cq.points)
                exact = field(cq.points)
                gexact = grad(cq.points)
                for c in range(3):
                    loc = vec[3 * ents + c]
                    pot = psi2 @ (op.cell_pot @ loc)
                    err = max(err, np.max(np.abs(pot - exact[:, c])))
                    for d in range(3):
                        gh = psi1 @ (op.cell_grad[d] @ loc)
                        err = max(err, np.max(np.abs(gh - gexact[:, c, d])))
                    for i, f in enumerate(op.faces):
                        fq = op.face_quads[i]
                        fp = op.face_basis2[i].eval(fq.points) @ \
                            (op.face_pot[i] @ loc)
                        err = max(err, np.max(np.abs(
                            fp - field(fq.points)[:, c])))
                    for i, e in enumerate(op.edges):
                        a, b = mesh.edges[e]
                        eq = poly.edge_quadrature(
                            mesh.vertices[a], mesh.vertices[b], order)
                        ep = edge_reconstruction_values(op, i, eq.points, loc)
                        err = max(err, np.max(np.abs(
                            ep - field(eq.points)[:, c])))
    return CheckResult("quadratic exactness", err, 1e-10)


def check_divergence_commutation(order=poly.DEFAULT_ORDER, n_samples=20,
                                 seed=0):
    """Moments of the discrete divergence match those of the exact one.

    For random cubic fields u and every linear function p on every cell,
    the integral of (div u - tr G_K I u) p vanishes.
    """
    rng = np.random.default_rng(seed)
    err = 0.0
    for _name, mesh, _fr, dofmap, ops in _check_meshes(order):
        for _ in range(n_samples):
            field, div = _random_cubic(rng)
            vec = interpolate(mesh, dofmap, field, ops=ops, order=order)
            for K in range(mesh.n_cells):
                op = ops[K]
                ents = dofmap.cell_entities(K)
                cq = op.cell_quad
                psi1 = op.cell_basis1.eval(cq.points)
                divh = np.zeros(len(cq.points))
                for c in range(3):
                    divh += psi1 @ (op.cell_grad[c] @ vec[3 * ents + c])
                gap = div(cq.points) - divh
                scale = mesh.cell_volume[K] * max(
                    1.0, np.max(np.abs(div(cq.points))))
                for j in range(4):
                    moment = cq.weights @ (gap * psi1[:, j])
                    err = max(err, abs(moment) / scale)
    return CheckResult("divergence commutation", err, 1e-9)


def _reference_stab(mesh, K, op):
    """Stabilization matrix recomputed directly from its definition."""
    ref = build_cell_operators(mesh, K, order=poly.DEFAULT_ORDER)
    return ref.stab


def check_stabilization(order=poly.DEFAULT_ORDER, n_samples=20, seed=0,
                        stab_face_scale=1.0):
    """Stabilization matches its definition and kills quadratic interpolants.

    ``stab_face_scale`` rescales the face mismatch term when the operators
    are built, so any value other than 1 makes this check fail.
    """
    rng = np.random.default_rng(seed)
    err = 0.0
    for name, (mesh, fr) in (
        ("cartesian", build_cartesian(1)),
        ("tetrahedral", build_tetrahedral(1)),
        ("hexacut", build_hexacut(2, seed=0, magnitude=0.25)),
    ):
        sides = classify_fracture_sides(mesh, fr)
        dofmap = DofMap(mesh, sides, fr)
        ops = build_all_operators(mesh, order, stab_face_scale)
        for K in range(mesh.n_cells):
            op = ops[K]
            ref = _reference_stab(mesh, K, op)
            scale = max(1.0, np.linalg.norm(ref))
            err = max(err, np.linalg.norm(op.stab - ref) / scale)
        for _ in range(n_samples):
            field, _grad = _random_quadratic(rng)
            vec = interpolate(mesh, dofmap, field, ops=ops, order=order)
            for K in range(mesh.n_cells):
                op = ops[K]
                ents = dofmap.cell_entities(K)
                scale = max(1.0, np.linalg.norm(op.stab))
                for c in range(3):
                    loc = vec[3 * ents + c]
                    val = abs(loc @ op.stab @ loc)
                    err = max(err, val / (scale * max(1.0, loc @ loc)))
    return CheckResult("stabilization consistency", err, 1e-9)


def check_patch_test(order=poly.DEFAULT_ORDER):
    """Solver reproduces a quadratic displacement field to round-off."""
    import sympy as sym
    from .verification import _X, _Y, _Z, _sigma, _lambdify_vec

    u = [_X * _X + 2 * _Y * _Z + 3 * _X,
         _Y * _Y - _X * _Z,
         _Z * _Z + _X * _Y - 2 * _Z]
    du = [[sym.diff(u[c], v) for v in (_X, _Y, _Z)] for c in range(3)]
    fu = _lambdify_vec(u)
    fg = _lambdify_vec([du[c][d] for c in range(3) for d in range(3)])
    err = 0.0
    for nu in (0.3, 0.49):
        params = MaterialParams(1.0, nu)
        sig = _sigma(sym.Matrix(u), params.G, params.L)
        f = [-sum(sym.diff(sig[i, j], v)
                  for j, v in enumerate((_X, _Y, _Z))) for i in range(3)]
        ff = _lambdify_vec(f)

        def disp(points, side=0):
            return fu(points)

        def force(points, side=0):
            return ff(points)

        for build in (build_cartesian, build_tetrahedral):
            mesh, fr = build(2)
            sides = classify_fracture_sides(mesh, fr)
            dofmap = DofMap(mesh, sides, fr)
            ops = build_all_operators(mesh, order)
            system = assemble(mesh, dofmap, ops, params, fr,
                              body_force=force)
            apply_dirichlet(system, g_D=disp)
            sol = newton_solve(system)
            num_u = den_u = num_g = den_g = 0.0
            for K in range(mesh.n_cells):
                op = ops[K]
                cq = op.cell_quad
                ue = fu(cq.points)
                ge = fg(cq.points)
                psi2 = op.cell_basis2.eval(cq.points)
                dpsi2 = op.cell_basis2.eval_grad(cq.points)
                ents = dofmap.cell_entities(K)
                for c in range(3):
                    ch = op.cell_pot @ sol.u[3 * ents + c]
                    num_u += cq.weights @ (ue[:, c] - psi2 @ ch) ** 2
                    gh = np.einsum("pjd,j->pd", dpsi2, ch)
                    num_g += cq.weights @ (
                        (ge[:, 3 * c:3 * c + 3] - gh) ** 2).sum(1)
                den_u += cq.weights @ (ue ** 2).sum(1)
                den_g += cq.weights @ (ge ** 2).sum(1)
            err = max(err, np.sqrt(num_u / den_u), np.sqrt(num_g / den_g))
    return CheckResult("quadratic patch test", err, 1e-9)


def run_all_checks(order=poly.DEFAULT_ORDER, seed=0, stab_face_scale=1.0,
                   n_samples=20):
    """Run every self-check; returns the list of CheckResult."""
    return [
        check_mean_identities(order, n_samples, seed),
        check_polynomial_exactness(order, n_samples, seed),
        check_divergence_commutation(order, n_samples, seed),
        check_stabilization(order, n_samples, seed, stab_face_scale),
        check_patch_test(order),
    ]
