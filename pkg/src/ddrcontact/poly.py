"""Monomial bases, quadrature, and L2 projections on mesh entities.

Bases are centered at the entity barycenter and scaled by the entity
diameter; no orthonormalization is performed (degree <= 2 throughout, so
plain Gram solves are well conditioned on shape-regular entities).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .mesh import MeshError

__all__ = [
    "MonomialBasis",
    "QuadRule",
    "edge_basis_exponents",
    "face_basis_exponents",
    "cell_basis_exponents",
    "edge_quadrature",
    "face_quadrature",
    "cell_quadrature",
    "l2_project",
]

DEFAULT_ORDER = 6


class QuadRule:
    """Points (in R3) and weights summing to the entity measure."""

    def __init__(self, points, weights):
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)

    def integrate(self, values):
        return self.weights @ values


# ----------------------------------------------------------------------
# reference rules
# ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def _gauss_segment(order):
    n = order // 2 + 1
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def _ref_triangle(order):
    """Conical-product rule on the unit triangle x,y >= 0, x + y <= 1."""
    n = order // 2 + 1
    xa, wa = np.polynomial.legendre.leggauss(n)
    xa = 0.5 * (xa + 1.0)
    wa = 0.5 * wa
    xb, wb = roots_jacobi(n, 1.0, 0.0)
    xb = 0.5 * (xb + 1.0)
    wb = 0.25 * wb
    pts, wts = [], []
    for i in range(n):
        for j in range(n):
            x = xb[j]
            y = xa[i] * (1.0 - xb[j])
            pts.append((x, y))
            wts.append(wa[i] * wb[j])
    return np.array(pts), np.array(wts)


@lru_cache(maxsize=None)
def _ref_tet(order):
    """Conical-product rule on the unit tetrahedron (volume 1/6)."""
    n = order // 2 + 1
    x1, w1 = np.polynomial.legendre.leggauss(n)
    x1 = 0.5 * (x1 + 1.0)
    w1 = 0.5 * w1
    x2, w2 = roots_jacobi(n, 1.0, 0.0)
    x2 = 0.5 * (x2 + 1.0)
    w2 = 0.25 * w2
    x3, w3 = roots_jacobi(n, 2.0, 0.0)
    x3 = 0.5 * (x3 + 1.0)
    w3 = 0.125 * w3
    pts, wts = [], []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                x = x3[k]
                y = x2[j] * (1.0 - x3[k])
                z = x1[i] * (1.0 - x2[j]) * (1.0 - x3[k])
                pts.append((x, y, z))
                wts.append(w1[i] * w2[j] * w3[k])
    return np.array(pts), np.array(wts)


# ----------------------------------------------------------------------
# entity rules
# ----------------------------------------------------------------------


def edge_quadrature(p0, p1, order=DEFAULT_ORDER):
    """Gauss-Legendre rule along the segment [p0, p1]."""
    x, w = _gauss_segment(order)
    mid = 0.5 * (np.asarray(p0) + np.asarray(p1))
    half = 0.5 * (np.asarray(p1) - np.asarray(p0))
    pts = mid[None, :] + x[:, None] * half[None, :]
    length = 2.0 * np.linalg.norm(half)
    return QuadRule(pts, w * length / 2.0)


def _map_triangle(a, b, c, order):
    rp, rw = _ref_triangle(order)
    pts = a[None, :] + rp[:, 0:1] * (b - a)[None, :] + rp[:, 1:2] * (c - a)[None, :]
    area2 = np.linalg.norm(np.cross(b - a, c - a))
    return pts, rw * 2.0 * area2 / 2.0


def face_quadrature(mesh, f, order=DEFAULT_ORDER):
    """Rule on a polygonal face via fan triangulation from its barycenter."""
    loop = mesh.face_loops[f]
    coords = mesh.vertices[loop]
    if len(loop) == 3:
        p, w = _map_triangle(coords[0], coords[1], coords[2], order)
        return QuadRule(p, w)
    center = mesh.face_center[f]
    pts, wts = [], []
    for i in range(len(loop)):
        p, w = _map_triangle(center, coords[i], coords[(i + 1) % len(loop)], order)
        pts.append(p)
        wts.append(w)
    return QuadRule(np.vstack(pts), np.concatenate(wts))


def cell_quadrature(mesh, K, order=DEFAULT_ORDER):
    """Rule on a polyhedral cell: tetrahedra fanned from the barycenter."""
    center = mesh.cell_center[K]
    rp, rw = _ref_tet(order)
    pts, wts = [], []
    for a, b, c in mesh.cell_boundary_triangles(K):
        mat = np.column_stack([a - center, b - center, c - center])
        det = np.linalg.det(mat)
        if det <= 0:
            raise MeshError(
                f"cell {K} is not star-shaped with respect to its barycenter"
            )
        p = center[None, :] + rp @ mat.T
        pts.append(p)
        wts.append(rw * det)
    return QuadRule(np.vstack(pts), np.concatenate(wts))


# ----------------------------------------------------------------------
# monomial bases
# ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def edge_basis_exponents(degree):
    return tuple(range(degree + 1))


@lru_cache(maxsize=None)
def face_basis_exponents(degree):
    return tuple(
        (i, j) for d in range(degree + 1) for i in range(d, -1, -1)
        for j in (d - i,)
    )


@lru_cache(maxsize=None)
def cell_basis_exponents(degree):
    out = []
    for d in range(degree + 1):
        for i in range(d, -1, -1):
            for j in range(d - i, -1, -1):
                out.append((i, j, d - i - j))
    return tuple(out)


class MonomialBasis:
    """Centered, diameter-scaled monomials on an edge, face, or cell.

    Edges use the arc-length coordinate from the midpoint; faces use the
    in-plane frame (t1, t2); cells use the global axes.
    """

    def __init__(self, kind, degree, center, scale, frame=None):
        self.kind = kind
        self.degree = degree
        self.center = np.asarray(center, dtype=float)
        self.scale = float(scale)
        self.frame = frame
        if kind == "edge":
            self.exponents = edge_basis_exponents(degree)
        elif kind == "face":
            self.exponents = face_basis_exponents(degree)
        elif kind == "cell":
            self.exponents = cell_basis_exponents(degree)
        else:
            raise ValueError(f"unknown entity kind {kind!r}")

    @classmethod
    def for_edge(cls, p0, p1, degree):
        p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
        center = 0.5 * (p0 + p1)
        length = np.linalg.norm(p1 - p0)
        return cls("edge", degree, center, length, frame=(p1 - p0) / length)

    @classmethod
    def for_face(cls, mesh, f, degree):
        t1, t2 = mesh.face_frame(f)
        return cls(
            "face", degree, mesh.face_center[f], mesh.face_diam[f], frame=(t1, t2)
        )

    @classmethod
    def for_cell(cls, mesh, K, degree):
        return cls("cell", degree, mesh.cell_center[K], mesh.cell_diam[K])

    def __len__(self):
        return len(self.exponents)

    def local_coords(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rel = (points - self.center) / self.scale
        if self.kind == "edge":
            return rel @ self.frame
        if self.kind == "face":
            t1, t2 = self.frame
            return np.column_stack([rel @ t1, rel @ t2])
        return rel

    def eval(self, points):
        """Values at points; shape (npoints, nbasis)."""
        loc = self.local_coords(points)
        if self.kind == "edge":
            return np.column_stack([loc**a for a in self.exponents])
        if self.kind == "face":
            return np.column_stack(
                [loc[:, 0] ** a * loc[:, 1] ** b for a, b in self.exponents]
            )
        return np.column_stack(
            [
                loc[:, 0] ** a * loc[:, 1] ** b * loc[:, 2] ** c
                for a, b, c in self.exponents
            ]
        )

    def eval_grad(self, points):
        """Gradients in global coordinates; shape (npoints, nbasis, 3)."""
        loc = self.local_coords(points)
        npts = loc.shape[0] if loc.ndim > 1 else len(np.atleast_1d(loc))
        out = np.zeros((npts, len(self.exponents), 3))
        if self.kind == "edge":
            t = np.atleast_1d(loc)
            for i, a in enumerate(self.exponents):
                if a > 0:
                    d = a * t ** (a - 1) / self.scale
                    out[:, i, :] = d[:, None] * self.frame[None, :]
            return out
        if self.kind == "face":
            t1, t2 = self.frame
            for i, (a, b) in enumerate(self.exponents):
                if a > 0:
                    d1 = a * loc[:, 0] ** (a - 1) * loc[:, 1] ** b / self.scale
                    out[:, i, :] += d1[:, None] * t1[None, :]
                if b > 0:
                    d2 = b * loc[:, 0] ** a * loc[:, 1] ** (b - 1) / self.scale
                    out[:, i, :] += d2[:, None] * t2[None, :]
            return out
        for i, (a, b, c) in enumerate(self.exponents):
            if a > 0:
                out[:, i, 0] = (
                    a * loc[:, 0] ** (a - 1) * loc[:, 1] ** b * loc[:, 2] ** c
                    / self.scale
                )
            if b > 0:
                out[:, i, 1] = (
                    b * loc[:, 0] ** a * loc[:, 1] ** (b - 1) * loc[:, 2] ** c
                    / self.scale
                )
            if c > 0:
                out[:, i, 2] = (
                    c * loc[:, 0] ** a * loc[:, 1] ** b * loc[:, 2] ** (c - 1)
                    / self.scale
                )
        return out

    def degrees(self):
        """Total degree of each basis function."""
        if self.kind == "edge":
            return np.array(self.exponents)
        return np.array([sum(e) for e in self.exponents])


def gram(basis, quad):
    phi = basis.eval(quad.points)
    return phi.T @ (quad.weights[:, None] * phi)


def l2_project(basis, quad, f):
    """L2-orthogonal projection of ``f`` onto the span of ``basis``.

    ``f`` is evaluated at the quadrature points and may be scalar
    (npoints,) or vector valued (npoints, m); returns coefficients of the
    same trailing shape.
    """
    phi = basis.eval(quad.points)
    G = phi.T @ (quad.weights[:, None] * phi)
    vals = np.asarray(f(quad.points) if callable(f) else f, dtype=float)
    rhs = phi.T @ (quad.weights[:, None] * vals if vals.ndim > 1
                   else quad.weights * vals)
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > 1e14:
        raise MeshError("singular Gram matrix (degenerate entity)")
    return np.linalg.solve(G, rhs)
