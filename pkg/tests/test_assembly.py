"""Global system assembly: symmetry, kernel, definiteness, Dirichlet."""

import numpy as np
import pytest

from ddrcontact.assembly import (
    MaterialParams,
    apply_dirichlet,
    assemble,
    local_stiffness,
    reduced_system,
)
from ddrcontact.checks import check_patch_test
from ddrcontact.contact import newton_solve
from ddrcontact.spaces import interpolate


PARAMS = MaterialParams(1.0, 0.3)


def test_material_params_validation():
    with pytest.raises(ValueError):
        MaterialParams(-1.0, 0.3)
    with pytest.raises(ValueError):
        MaterialParams(1.0, 0.5)
    with pytest.raises(ValueError):
        MaterialParams(1.0, 0.3, mu1=0.0)
    p = MaterialParams.from_lame(1.0, 1.0)
    assert p.G == pytest.approx(1.0)
    assert p.L == pytest.approx(1.0)
    assert p.nu == pytest.approx(0.25)
    # default stabilization weight is E / (1 + nu) = 2 G
    assert p.mu1 == pytest.approx(2.0)


def test_local_stiffness_symmetric_psd(hexacut2):
    b = hexacut2
    for K in (0, len(b.ops) - 1):
        Kloc = local_stiffness(b.mesh, K, b.ops[K], PARAMS)
        assert np.allclose(Kloc, Kloc.T, atol=1e-12)
        w = np.linalg.eigvalsh(Kloc)
        assert w.min() > -1e-10 * max(1.0, w.max())


def test_rigid_motions_in_kernel(hexacut2, rng):
    """Translations and infinitesimal rotations carry no energy."""
    b = hexacut2
    A = assemble(b.mesh, b.dofmap, b.ops, PARAMS, b.fracture).A
    a = rng.standard_normal(3)
    w = rng.standard_normal(3)

    def rigid(points, side=0):
        return a + np.cross(w, points)

    vec = interpolate(b.mesh, b.dofmap, rigid, ops=b.ops)
    scale = np.abs(A).max() * np.abs(vec).max()
    assert np.max(np.abs(A @ vec)) < 1e-11 * scale


def test_global_matrix_symmetric(cart2_frac):
    b = cart2_frac
    A = assemble(b.mesh, b.dofmap, b.ops, PARAMS, b.fracture).A
    assert abs(A - A.T).max() < 1e-12 * abs(A).max()


def test_reduced_system_positive_definite(cart2):
    b = cart2
    system = assemble(b.mesh, b.dofmap, b.ops, PARAMS, b.fracture)
    apply_dirichlet(system, g_D=None)
    A_ff, _ = reduced_system(system)
    w = np.linalg.eigvalsh(A_ff.toarray())
    assert w.min() > 0


def test_dirichlet_lifting_reproduces_linear_field(cart2):
    """Zero load with linear boundary data returns the linear field."""
    b = cart2
    M = np.array([[0.2, -0.1, 0.4], [0.0, 0.3, -0.2], [0.1, 0.1, 0.0]])

    def lin(points, side=0):
        return points @ M.T

    system = assemble(b.mesh, b.dofmap, b.ops, PARAMS, b.fracture)
    apply_dirichlet(system, g_D=lin)
    sol = newton_solve(system)
    exact = interpolate(b.mesh, b.dofmap, lin, ops=b.ops)
    assert np.max(np.abs(sol.u - exact)) < 1e-11


def test_quadratic_patch():
    r = check_patch_test()
    assert r.passed, r
