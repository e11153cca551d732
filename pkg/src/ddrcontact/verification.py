"""Manufactured contact solutions, error norms, and convergence studies.

Each case provides closed-form displacement branches on the two sides of
the fracture plane x = 0, the induced stress, body force, and interface
traction, derived symbolically once and compiled to vectorized numpy
callables.  Errors are relative L2 norms of the displacement, its jump
across the fracture, its gradient, and the normal multiplier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sym

from .assembly import MaterialParams, apply_dirichlet, assemble
from .contact import NewtonConfig, newton_solve
from .mesh import (
    FracturePlane,
    build_cartesian,
    build_hexacut,
    build_tetrahedral,
    classify_fracture_sides,
)
from .poly import DEFAULT_ORDER, face_quadrature
from .spaces import DofMap, build_all_operators, interpolate, jump_coeffs

__all__ = [
    "ManufacturedCase",
    "ErrorRow",
    "case_frictionless_61",
    "case_tresca_62",
    "case_incompressible_63",
    "get_case",
    "check_case",
    "solve_case",
    "compute_errors",
    "convergence_study",
    "write_csv",
    "CSV_COLUMNS",
]

_X, _Y, _Z = sym.symbols("x y z", real=True)

MESH_BUILDERS = {
    "cartesian": build_cartesian,
    "tetrahedral": build_tetrahedral,
    "hexacut": build_hexacut,
}


def _lambdify_vec(exprs):
    """Compile a list of scalar expressions to an (npts, m) evaluator."""
    fns = [sym.lambdify((_X, _Y, _Z), e, modules="numpy") for e in exprs]

    def evaluate(points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        px, py, pz = points[:, 0], points[:, 1], points[:, 2]
        cols = []
        for fn in fns:
            v = fn(px, py, pz)
            cols.append(np.broadcast_to(np.asarray(v, dtype=float), px.shape))
        return np.column_stack(cols)

    return evaluate


@dataclass
class ManufacturedCase:
    """Closed-form two-sided exact solution on (-1,1)^3 with fracture x=0.

    Side +1 is the trace from x > 0 (the positive side of the fracture
    orientation); all callables take (npts, 3) point arrays, the bulk
    fields additionally a side argument.
    """

    name: str
    params: MaterialParams
    g: float
    _disp: dict = field(repr=False, default_factory=dict)
    _grad: dict = field(repr=False, default_factory=dict)
    _force: dict = field(repr=False, default_factory=dict)
    _traction: object = field(repr=False, default=None)
    _jump: object = field(repr=False, default=None)
    domain: tuple = (((-1, 1), (-1, 1), (-1, 1)))

    def displacement(self, points, side):
        return self._disp[1 if side >= 0 else -1](points)

    def displacement_grad(self, points, side):
        flat = self._grad[1 if side >= 0 else -1](points)
        return flat.reshape(-1, 3, 3)

    def body_force(self, points, side):
        return self._force[1 if side >= 0 else -1](points)

    def traction(self, points):
        """Multiplier lambda = -sigma(u+) n+ at points of the fracture."""
        return self._traction(points)

    def lambda_n(self, points):
        return self.traction(points) @ self.n_plus

    def jump(self, points):
        """Displacement jump u(+side) - u(-side) at fracture points."""
        return self._jump(points)

    @property
    def n_plus(self):
        return np.array([-1.0, 0.0, 0.0])

    def side_of(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.where(points[:, 0] > 0.0, 1, -1)

    def fracture_plane(self):
        return FracturePlane("x", 0.0, g=self.g)


def _sigma(u, G, L):
    J = u.jacobian([_X, _Y, _Z])
    eps = (J + J.T) / 2
    return 2 * G * eps + L * eps.trace() * sym.eye(3)


def _make_case(name, G, L, g, u_top, u_neg, u_pos):
    """Assemble a ManufacturedCase from per-branch displacement columns.

    ``u_top`` applies for z >= 0 on both sides; ``u_pos``/``u_neg`` are the
    z < 0 branches of the x > 0 and x < 0 sides.
    """
    params = MaterialParams.from_lame(G, L)
    case = ManufacturedCase(name=name, params=params, g=g)
    side_exprs = {}
    for side, u_low in ((1, u_pos), (-1, u_neg)):
        u = sym.Matrix(
            [sym.Piecewise((u_top[i], _Z >= 0), (u_low[i], True))
             for i in range(3)]
        )
        side_exprs[side] = u
        case._disp[side] = _lambdify_vec(list(u))
        J = u.jacobian([_X, _Y, _Z])
        case._grad[side] = _lambdify_vec([J[i, j] for i in range(3)
                                          for j in range(3)])
        S = _sigma(u, G, L)
        f = sym.Matrix([-sum(sym.diff(S[i, j], v)
                             for j, v in enumerate((_X, _Y, _Z)))
                        for i in range(3)])
        case._force[side] = _lambdify_vec([sym.simplify(c) for c in f])
    # traction lambda = -sigma(u+) n+ with n+ = -e_x, evaluated at x = 0
    S_plus = _sigma(side_exprs[1], G, L)
    lam = sym.Matrix([S_plus[i, 0].subs(_X, 0) for i in range(3)])
    case._traction = _lambdify_vec(list(lam))
    diff = (side_exprs[1] - side_exprs[-1]).subs(_X, 0)
    case._jump = _lambdify_vec(list(diff))
    return case


def case_frictionless_61():
    """Frictionless contact (g = 0) with G = L = 1.

    The fracture is open for z < 0 with normal jump -min(z,0)^4, and in
    contact for z > 0.
    """
    q = -sym.sin(sym.pi * _X / 2) * sym.cos(sym.pi * _Y / 2)
    p = _Z**2
    h = sym.cos(sym.pi * _X / 2)
    int_h = 2 / sym.pi * sym.sin(sym.pi * _X / 2)
    u_top = [q * p, p, _X**2 * p]

    def low(pz):
        dpz = sym.diff(pz, _Z)
        return [h * pz, h * dpz, -int_h * dpz]

    return _make_case("frictionless_61", 1.0, 1.0, 0.0,
                      u_top, low(_Z**4), low(2 * _Z**4))


def case_tresca_62():
    """Tresca friction with threshold g = 1 and G = L = 1.

    Slipping contact for z < 0, sticking contact for z > 0.
    """
    g = 1.0
    h = -sym.sin(_X) * sym.cos(_Y)
    P = _Z**2
    Q = _Z**2 / 4
    u_top = [h * P - g * _Y, P, _X**2 * P]
    u_neg = [h * Q - g * _Y, 2 * Q, _X**2 * Q]
    u_pos = [h * Q - g * _Y, Q, _X**2 * Q]
    return _make_case("tresca_62", 1.0, 1.0, g, u_top, u_neg, u_pos)


def case_incompressible_63(L):
    """Nearly incompressible Tresca case: G = 1, threshold g = 1/L.

    A divergence-free cubic base field plus a 1/L-scaled contact
    perturbation; errors should not degrade as L grows.
    """
    if L <= 0:
        raise ValueError("second Lame coefficient must be positive")
    base = [
        _X**3 * (sym.cos(_Y) + sym.sin(_Z)),
        -3 * _X**2 * sym.sin(_Y),
        3 * _X**2 * sym.cos(_Z),
    ]
    h = -sym.sin(_X) * sym.cos(_Y)
    P = _Z**2
    Q = _Z**2 / 4
    invL = sym.Rational(1) / L
    u_top = [base[i] + invL * v
             for i, v in enumerate([h * P - _Y, P, _X**2 * P])]
    u_neg = [base[i] + invL * v
             for i, v in enumerate([h * Q - _Y, 2 * Q, _X**2 * Q])]
    u_pos = [base[i] + invL * v
             for i, v in enumerate([h * Q - _Y, Q, _X**2 * Q])]
    name = f"incompressible_63_L{L:g}"
    return _make_case(name, 1.0, float(L), 1.0 / float(L),
                      u_top, u_neg, u_pos)


def get_case(name, L=None):
    """Look up a manufactured case by name."""
    if name == "frictionless_61":
        return case_frictionless_61()
    if name == "tresca_62":
        return case_tresca_62()
    if name == "incompressible_63":
        return case_incompressible_63(1.0 if L is None else L)
    raise ValueError(f"unknown case {name!r}")


def check_case(case, n_points=50, seed=12345, tol=1e-9):
    """Internal consistency checks of a manufactured case.

    Verifies interface traction balance, the contact law (admissibility,
    complementarity, slip alignment with the multiplier), and the body
    force against a fourth-order finite-difference divergence of the
    hand-derived stress.  Raises AssertionError on failure.
    """
    rng = np.random.default_rng(seed)
    yz = rng.uniform(-1.0, 1.0, size=(n_points, 2))
    pts = np.column_stack([np.zeros(n_points), yz])
    G, L = case.params.G, case.params.L

    def stress_normal(side):
        J = case.displacement_grad(pts, side)
        eps = 0.5 * (J + np.transpose(J, (0, 2, 1)))
        tr = np.trace(eps, axis1=1, axis2=2)
        sig = 2 * G * eps + L * tr[:, None, None] * np.eye(3)
        return sig @ case.n_plus

    sp, sm = stress_normal(1), stress_normal(-1)
    scale = max(1.0, np.abs(sp).max())
    assert np.abs(sp - sm).max() <= tol * scale, "traction imbalance across the fracture"

    lam = case.traction(pts)
    lam_n = lam @ case.n_plus
    lam_t = lam - lam_n[:, None] * case.n_plus
    jmp = case.jump(pts)
    j_n = jmp @ case.n_plus
    j_t = jmp - j_n[:, None] * case.n_plus
    lt = np.linalg.norm(lam_t, axis=1)
    jt = np.linalg.norm(j_t, axis=1)
    assert lam_n.min() >= -1e-10, "negative normal multiplier"
    assert j_n.max() <= 1e-10, "penetrating normal jump"
    assert np.abs(lam_n * j_n).max() <= 1e-10, "normal complementarity violated"
    assert lt.max() <= case.g + 1e-10, "friction bound violated"
    # slip aligns with the multiplier: lam_t . j_t = g |j_t|
    align = np.einsum("ij,ij->i", lam_t, j_t) - case.g * jt
    assert np.abs(align).max() <= tol * max(1.0, case.g), "slip rule violated"
    # sticking faces do not slip
    assert jt[(lt < case.g - 1e-10)].max(initial=0.0) <= 1e-10, "slip below the bound"

    # body force against finite differences of the stress divergence
    chk = rng.uniform(-0.9, 0.9, size=(20, 3))
    chk = chk[np.abs(chk[:, 0]) > 0.05]
    step = 1e-4
    coef = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * step)
    offs = np.array([-2.0, -1.0, 1.0, 2.0]) * step

    def stress_at(p, side):
        J = case.displacement_grad(p, side)
        eps = 0.5 * (J + np.transpose(J, (0, 2, 1)))
        tr = np.trace(eps, axis1=1, axis2=2)
        return 2 * G * eps + L * tr[:, None, None] * np.eye(3)

    side = case.side_of(chk)
    for s in (1, -1):
        sel = chk[side == s]
        if not len(sel):
            continue
        div = np.zeros((len(sel), 3))
        for j in range(3):
            for c, o in zip(coef, offs):
                q = sel.copy()
                q[:, j] += o
                div += c * stress_at(q, s)[:, :, j]
        f = case.body_force(sel, s)
        assert np.abs(f + div).max() <= 1e-6 * max(1.0, np.abs(f).max()), \
            "body force does not match -div sigma"
    return True


# ----------------------------------------------------------------------
# solve pipeline and errors
# ----------------------------------------------------------------------


@dataclass
class ErrorRow:
    """One refinement level of a convergence study."""

    case: str
    family: str
    level: int
    n: int
    h: float
    n_cells: int
    n_dofs: int
    newton_iters: int
    e_u: float
    e_jump: float
    e_grad: float
    e_lambda_n: float
    ord_u: float = math.nan
    ord_jump: float = math.nan
    ord_grad: float = math.nan
    ord_lambda_n: float = math.nan


CSV_COLUMNS = [
    "case", "family", "level", "n", "h", "n_cells", "n_dofs",
    "newton_iters", "e_u", "e_jump", "e_grad", "e_lambda_n",
    "ord_u", "ord_jump", "ord_grad", "ord_lambda_n",
]


def build_family(family, n, case, seed=0, magnitude=0.25):
    """Build the mesh of one family with the case's fracture plane."""
    if family not in MESH_BUILDERS:
        raise ValueError(f"unknown mesh family {family!r}")
    plane = case.fracture_plane()
    if family == "hexacut":
        return build_hexacut(n, case.domain, fracture_planes=(plane,),
                             seed=seed, magnitude=magnitude)
    return MESH_BUILDERS[family](n, case.domain, fracture_planes=(plane,))


@dataclass
class SolveResult:
    mesh: object
    fracture: object
    dofmap: object
    ops: list
    system: object
    solution: object


def solve_case(case, family="cartesian", n=2, seed=0, magnitude=0.25,
               newton=None, order=DEFAULT_ORDER, mesh_data=None):
    """Run the full pipeline of one manufactured case on one mesh."""
    if mesh_data is None:
        mesh, fracture = build_family(family, n, case, seed, magnitude)
    else:
        mesh, fracture = mesh_data
    sides = classify_fracture_sides(mesh, fracture)
    dofmap = DofMap(mesh, sides, fracture)
    ops = build_all_operators(mesh, order)

    def side_of(points):
        return case.side_of(points)

    system = assemble(mesh, dofmap, ops, case.params, fracture,
                      body_force=case.body_force, side_of=side_of)
    apply_dirichlet(system, g_D=case.displacement, side_of=side_of,
                    order=order)
    solution = newton_solve(system, newton)
    if not solution.converged:
        raise RuntimeError(
            f"contact solver did not converge on {family} n={n}: "
            f"residuals {solution.residual_history[-3:]}"
        )
    return SolveResult(mesh, fracture, dofmap, ops, system, solution)


def compute_errors(case, result, order=DEFAULT_ORDER):
    """Relative L2 errors (e_u, e_jump, e_grad, e_lambda_n)."""
    mesh = result.mesh
    dofmap = result.dofmap
    ops = result.ops
    sol = result.solution
    if not sol.converged:
        raise RuntimeError("refusing to measure errors of a non-converged solve")
    vec = sol.u

    num_u = den_u = num_g = den_g = 0.0
    for K in range(mesh.n_cells):
        op = ops[K]
        cq = op.cell_quad
        side = case.side_of(mesh.cell_center[K][None, :])[0]
        ue = case.displacement(cq.points, side)
        ge = case.displacement_grad(cq.points, side)
        psi2 = op.cell_basis2.eval(cq.points)
        dpsi2 = op.cell_basis2.eval_grad(cq.points)
        ents = dofmap.cell_entities(K)
        uh = np.empty_like(ue)
        gh = np.empty_like(ge)
        for c in range(3):
            coeff = op.cell_pot @ vec[3 * ents + c]
            uh[:, c] = psi2 @ coeff
            gh[:, c, :] = np.einsum("pjd,j->pd", dpsi2, coeff)
        num_u += cq.weights @ ((ue - uh) ** 2).sum(axis=1)
        den_u += cq.weights @ (ue**2).sum(axis=1)
        num_g += cq.weights @ ((ge - gh) ** 2).sum(axis=(1, 2))
        den_g += cq.weights @ (ge**2).sum(axis=(1, 2))

    fracture = result.fracture
    num_j = den_j = num_l = den_l = 0.0
    for i in range(fracture.n_faces):
        f = fracture.face_ids[i]
        fq = face_quadrature(mesh, f, order)
        je = case.jump(fq.points)
        basis, coeffs = jump_coeffs(mesh, fracture, dofmap, ops, vec, i)
        jh = basis.eval(fq.points) @ coeffs
        num_j += fq.weights @ ((je - jh) ** 2).sum(axis=1)
        den_j += fq.weights @ (je**2).sum(axis=1)
        le = case.lambda_n(fq.points)
        lh = sol.lam[i, 0]
        num_l += fq.weights @ (le - lh) ** 2
        den_l += fq.weights @ le**2

    def rel(num, den):
        # absolute norm fallback when the exact field vanishes
        return math.sqrt(num / den) if den > 1e-28 else math.sqrt(num)

    return rel(num_u, den_u), rel(num_j, den_j), rel(num_g, den_g), \
        rel(num_l, den_l)


def convergence_study(case, family="cartesian", levels=(2, 4), seed=0,
                      magnitude=0.25, newton=None, order=DEFAULT_ORDER,
                      on_row=None):
    """Run the case over refinement levels and tabulate errors and orders."""
    if len(levels) < 1:
        raise ValueError("at least one refinement level is required")
    rows = []
    prev = None
    for lvl, n in enumerate(levels, start=1):
        result = solve_case(case, family, n, seed=seed, magnitude=magnitude,
                            newton=newton, order=order)
        e_u, e_jump, e_grad, e_ln = compute_errors(case, result, order)
        h = float(result.mesh.cell_diam.max())
        row = ErrorRow(
            case=case.name, family=family, level=lvl, n=n, h=h,
            n_cells=result.mesh.n_cells, n_dofs=result.dofmap.n_dofs,
            newton_iters=result.solution.iterations,
            e_u=e_u, e_jump=e_jump, e_grad=e_grad, e_lambda_n=e_ln,
        )
        if prev is not None and prev.h > row.h:
            ratio = math.log(prev.h / row.h)
            for attr in ("u", "jump", "grad", "lambda_n"):
                ep, ec = getattr(prev, f"e_{attr}"), getattr(row, f"e_{attr}")
                if ep > 0 and ec > 0:
                    setattr(row, f"ord_{attr}", math.log(ep / ec) / ratio)
        rows.append(row)
        prev = row
        if on_row is not None:
            on_row(row)
    return rows


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(rows, path):
    """Write study rows in the fixed CSV schema (12 significant digits)."""
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(getattr(row, c)) for c in CSV_COLUMNS) + "\n")
