"""Projections, generalized Jacobian, Newton solver, contact states."""

import numpy as np
import pytest

from ddrcontact.assembly import MaterialParams, apply_dirichlet, assemble
from ddrcontact.contact import (
    NewtonConfig,
    _complementarity,
    _generalized_jacobian,
    classify_states,
    newton_solve,
    project_ball,
    project_plus,
)
from ddrcontact.problems import two_fracture_compression
from ddrcontact.verification import get_case, solve_case


def test_projections_basic():
    assert project_plus(np.array([-1.0, 0.0, 2.0])).tolist() == [0.0, 0.0, 2.0]
    v = np.array([3.0, 4.0])
    assert np.allclose(project_ball(v, 1.0), v / 5.0)
    assert np.allclose(project_ball(v, 10.0), v)
    assert np.allclose(project_ball(np.zeros(2), 1.0), np.zeros(2))


def test_projections_properties(rng):
    """Idempotence and non-expansiveness on random data."""
    for _ in range(100):
        r = rng.uniform(0.1, 2.0)
        v, w = rng.standard_normal((2, 2)) * 3
        pv, pw = project_ball(v, r), project_ball(w, r)
        assert np.linalg.norm(pv) <= r + 1e-14
        assert np.allclose(project_ball(pv, r), pv)
        assert np.linalg.norm(pv - pw) <= np.linalg.norm(v - w) + 1e-14


def test_generalized_jacobian_matches_finite_differences(rng):
    """Away from ties the Jacobian equals the FD derivative."""
    nf = 6
    g = np.full(nf, 1.0)
    beta_n = np.full(nf, 3.0)
    beta_t = np.full(nf, 4.0)
    lam = rng.standard_normal((nf, 3))
    jumps = rng.standard_normal(3 * nf)
    D_lam, D_jump = _generalized_jacobian(lam, jumps, g, beta_n, beta_t)
    h = 1e-6

    def res(lam_, jumps_):
        return _complementarity(lam_, jumps_, g, beta_n, beta_t)

    base = res(lam, jumps)
    for i in range(nf):
        for c in range(3):
            lam2 = lam.copy()
            lam2[i, c] += h
            fd = (res(lam2, jumps) - base)[3 * i: 3 * i + 3] / h
            assert np.allclose(D_lam[i][:, c], fd, atol=1e-6)
            jumps2 = jumps.copy()
            jumps2[3 * i + c] += h
            fd = (res(lam, jumps2) - base)[3 * i: 3 * i + 3] / h
            assert np.allclose(D_jump[i][:, c], fd, atol=1e-6)


def test_classify_states_synthetic():
    g = np.array([1.0, 1.0, 1.0, 1.0])
    lam = np.array([
        [0.0, 0.1, 0.0],   # open, below the friction bound
        [2.0, 0.2, 0.1],   # contact, below the bound
        [0.0, 0.8, 0.6],   # open, at the bound
        [3.0, 0.6, 0.8],   # contact, at the bound
    ])
    jumps = np.array([-0.5, 0, 0, 0, 0, 0, -0.2, 0, 0, 0, 0.1, 0.2])
    states = classify_states(lam, jumps, g)
    assert states.tolist() == [0, 1, 2, 3]


def test_no_fracture_single_linear_solve(cart2):
    b = cart2
    params = MaterialParams(1.0, 0.3)

    def force(points, side=0):
        return np.column_stack([np.sin(points[:, 0]),
                                np.zeros(len(points)),
                                np.cos(points[:, 1])])

    system = assemble(b.mesh, b.dofmap, b.ops, params, b.fracture,
                      body_force=force)
    apply_dirichlet(system, g_D=None)
    sol = newton_solve(system)
    assert sol.converged
    assert sol.iterations == 0
    assert sol.lam.shape == (0, 3)


@pytest.fixture(scope="module")
def tresca_n2():
    case = get_case("tresca_62")
    return case, solve_case(case, "cartesian", 2)


def test_tresca_converges_fast(tresca_n2):
    _, result = tresca_n2
    sol = result.solution
    assert sol.converged
    assert sol.iterations <= 12
    from ddrcontact.assembly import reduced_system
    _, rhs = reduced_system(result.system)
    scale = max(sol.residual_history[0], np.linalg.norm(rhs))
    assert sol.residual_history[-1] <= 1e-12 * scale


def test_solution_admissibility(tresca_n2):
    """KKT conditions of the discrete contact problem at the solution."""
    case, result = tresca_n2
    sol = result.solution
    fr = result.fracture
    from ddrcontact.contact import _face_frames, _jump_operator
    frames = _face_frames(result.mesh, fr)
    J = _jump_operator(result.system, frames)
    jumps = J @ sol.u
    tol = 1e-9
    for i in range(fr.n_faces):
        jn = jumps[3 * i]
        jt = jumps[3 * i + 1: 3 * i + 3]
        ln = sol.lam[i, 0]
        lt = sol.lam[i, 1:]
        # non-penetration and compressive multiplier
        assert jn <= tol
        assert ln >= -tol
        assert abs(ln * jn) <= tol
        # friction bound and slip alignment
        assert np.linalg.norm(lt) <= fr.g[i] + tol
        assert abs(lt @ jt - fr.g[i] * np.linalg.norm(jt)) <= tol


def test_two_fracture_demo_all_states():
    result = two_fracture_compression(n=4)
    sol = result.solution
    assert sol.converged
    assert set(sol.states.tolist()) <= {0, 1, 2, 3}
    assert len(set(sol.states.tolist())) >= 2
    assert len(sol.states) == result.fracture.n_faces


def test_config_beta_override():
    case = get_case("tresca_62")
    r1 = solve_case(case, "cartesian", 2, newton=NewtonConfig(beta_n=1e3,
                                                             beta_t=1e3))
    assert r1.solution.converged
