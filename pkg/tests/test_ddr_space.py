"""Discrete space: DOF map, reconstructions, interpolation, jumps."""

import numpy as np
import pytest

from ddrcontact.checks import (
    check_divergence_commutation,
    check_mean_identities,
    check_polynomial_exactness,
    check_stabilization,
)
from ddrcontact.mesh import FracturePlane, build_cartesian, \
    classify_fracture_sides
from ddrcontact.spaces import DofMap, build_all_operators, interpolate, \
    jump_coeffs, mean_jump


def test_dofmap_counts_without_fracture(cart2):
    d = cart2.dofmap
    m = cart2.mesh
    assert d.n_entities == m.n_vertices + m.n_edges + m.n_faces + m.n_cells
    assert d.n_dofs == 3 * d.n_entities


def test_dofmap_duplicates_fracture_entities(cart2_frac):
    d = cart2_frac.dofmap
    m = cart2_frac.mesh
    fr = cart2_frac.fracture
    extra = 9 + 12 + fr.n_faces  # split plane vertices, edges, face sides
    assert d.n_entities == m.n_vertices + m.n_edges + m.n_faces \
        + m.n_cells + extra
    # the two sides of a fracture face are distinct entities
    for i, f in enumerate(fr.face_ids):
        K, L = fr.sides(m, i)
        assert d.face_entity(f, K) != d.face_entity(f, L)


def test_mean_identities():
    r = check_mean_identities(n_samples=5)
    assert r.passed, r


def test_quadratic_exactness():
    r = check_polynomial_exactness(n_samples=5)
    assert r.passed, r


def test_divergence_commutation():
    r = check_divergence_commutation(n_samples=5)
    assert r.passed, r


def test_stabilization_consistency():
    r = check_stabilization(n_samples=5)
    assert r.passed, r


def test_stabilization_fault_injection_detected():
    r = check_stabilization(n_samples=2, stab_face_scale=2.0)
    assert not r.passed


def test_two_sided_interpolation_and_jump(cart2_frac):
    """A field discontinuous across x = 0 interpolates side by side."""
    m = cart2_frac.mesh
    fr = cart2_frac.fracture
    d = cart2_frac.dofmap
    ops = cart2_frac.ops

    def side_of(points):
        return np.where(points[:, 0] >= 0, 1, -1)

    def field(points, side):
        base = np.column_stack([
            points[:, 1] ** 2, points[:, 0] * points[:, 2], points[:, 2]])
        if side >= 0:
            base = base + np.array([1.0, 0.5, 0.0])
        return base

    vec = interpolate(m, d, field, side_of=side_of, ops=ops)
    exact_jump = np.array([1.0, 0.5, 0.0])
    for i in range(fr.n_faces):
        jm = mean_jump(m, fr, d, vec, i)
        assert np.allclose(jm, exact_jump, atol=1e-12)
        basis, coeffs = jump_coeffs(m, fr, d, ops, vec, i)
        f = fr.face_ids[i]
        from ddrcontact.poly import face_quadrature
        fq = face_quadrature(m, f, 6)
        vals = basis.eval(fq.points) @ coeffs
        assert np.allclose(vals, exact_jump[None, :], atol=1e-11)


def test_interpolation_matches_entity_means(cart2, rng):
    """Vertex DOFs are point values, face DOFs are face means."""
    m = cart2.mesh
    d = cart2.dofmap

    c = rng.standard_normal((3, 3))

    def field(points, side=0):
        return np.sin(points) @ c.T

    vec = interpolate(m, d, field, ops=cart2.ops)
    for s in range(0, m.n_vertices, 7):
        K = m.cells_of_vertex[s][0]
        idx = d.vertex_entity(s, K)
        assert np.allclose(vec[3 * idx: 3 * idx + 3],
                           field(m.vertices[s][None, :])[0], atol=1e-13)
    from ddrcontact.poly import face_quadrature
    for f in range(0, m.n_faces, 11):
        K = m.cells_of_face[f][0]
        idx = d.face_entity(f, K)
        fq = face_quadrature(m, f, 6)
        mean = fq.weights @ field(fq.points) / m.face_area[f]
        assert np.allclose(vec[3 * idx: 3 * idx + 3], mean, atol=1e-12)
