"""Semi-smooth Newton solver for the Tresca contact conditions.

The unknowns are the free displacement DOFs together with one Lagrange
multiplier vector per fracture face, stored in the local face frame
(normal, tangent 1, tangent 2).  Non-penetration and the Tresca friction
bound are enforced through complementarity functions based on the
projections onto the half-line and the friction disk, linearized with a
generalized Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import expand_solution, reduced_system

__all__ = [
    "NewtonConfig",
    "ContactSolution",
    "project_plus",
    "project_ball",
    "newton_solve",
    "classify_states",
]

STATE_NAMES = ("open-stick", "contact-stick", "open-slip", "contact-slip")


@dataclass(frozen=True)
class NewtonConfig:
    """Semi-smooth Newton parameters.

    ``beta_n`` and ``beta_t`` default per face to ``10 (2 G + L) / h_f``
    with ``h_f`` the face diameter.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_iter: int = 50
    beta_n: float = None
    beta_t: float = None
    max_halvings: int = 8


@dataclass
class ContactSolution:
    """Converged state of the contact problem."""

    u: np.ndarray  # full displacement DOF vector (Dirichlet included)
    lam: np.ndarray  # (n_faces, 3) multiplier in the face frame (n, t1, t2)
    lam_global: np.ndarray  # (n_faces, 3) multiplier in global coordinates
    iterations: int
    converged: bool
    residual_history: list = field(default_factory=list)
    states: np.ndarray = None  # per-face contact state code 0..3


def project_plus(x):
    """Projection onto the nonnegative half-line."""
    return np.maximum(x, 0.0)


def project_ball(v, r):
    """Projection of a vector onto the closed ball of radius ``r``."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm <= r or norm == 0.0:
        return v.copy()
    return (r / norm) * v


def _face_frames(mesh, fracture):
    """Orthonormal (n_plus, t1, t2) frame per fracture face."""
    frames = np.empty((fracture.n_faces, 3, 3))
    for i, f in enumerate(fracture.face_ids):
        n = fracture.n_plus[i]
        t1, t2 = mesh.face_frame(f)
        # keep the frame right-handed with respect to n_plus
        if np.dot(np.cross(t1, t2), n) < 0:
            t2 = -t2
        frames[i, 0] = n
        frames[i, 1] = t1
        frames[i, 2] = t2
    return frames


def _jump_operator(system, frames):
    """Sparse map from free displacement DOFs to framed mean jumps.

    Row ``3 i + k`` of the result gives the k-th frame component (normal,
    then tangents) of the mean jump ``u_K - u_L`` on fracture face i.
    """
    dofmap = system.dofmap
    mesh = dofmap.mesh
    fracture = system.fracture
    nf = fracture.n_faces
    rows, cols, vals = [], [], []
    for i in range(nf):
        f = fracture.face_ids[i]
        K, L = fracture.sides(mesh, i)
        eK = dofmap.face_entity(f, K)
        eL = dofmap.face_entity(f, L)
        for k in range(3):
            for c in range(3):
                w = frames[i, k, c]
                if w == 0.0:
                    continue
                rows += [3 * i + k, 3 * i + k]
                cols += [3 * eK + c, 3 * eL + c]
                vals += [w, -w]
    J = sp.coo_matrix(
        (vals, (rows, cols)), shape=(3 * nf, dofmap.n_dofs)
    ).tocsr()
    return J


def _default_beta(system, config):
    mesh = system.dofmap.mesh
    fracture = system.fracture
    p = system.params
    h = mesh.face_diam[fracture.face_ids]
    base = 10.0 * (2.0 * p.G + p.L) / h
    beta_n = np.full(fracture.n_faces, config.beta_n) \
        if config.beta_n is not None else base.copy()
    beta_t = np.full(fracture.n_faces, config.beta_t) \
        if config.beta_t is not None else base.copy()
    return beta_n, beta_t


def _complementarity(lam, jumps, g, beta_n, beta_t):
    """Residual rows of the contact conditions, one (3,) block per face.

    Normal: ``lam_n - [lam_n + beta_n J_n]_+``; tangential:
    ``lam_t - P_{g}(lam_t + beta_t J_t)``.  Rows are scaled by
    ``1 / max(1, beta)`` so the tolerances are mesh independent.
    """
    nf = len(g)
    C = np.empty(3 * nf)
    for i in range(nf):
        zn = lam[i, 0] + beta_n[i] * jumps[3 * i]
        C[3 * i] = (lam[i, 0] - project_plus(zn)) / max(1.0, beta_n[i])
        zt = lam[i, 1:] + beta_t[i] * jumps[3 * i + 1 : 3 * i + 3]
        C[3 * i + 1 : 3 * i + 3] = (
            lam[i, 1:] - project_ball(zt, g[i])
        ) / max(1.0, beta_t[i])
    return C


def _generalized_jacobian(lam, jumps, g, beta_n, beta_t):
    """Per-face derivative blocks of the complementarity residual.

    Returns (D_lam, D_jump): lists of (3, 3) matrices so that the residual
    rows of face i linearize as ``D_lam[i] dlam_i + D_jump[i] dJ_i``.
    Ties (boundary of the active set) use the inactive and stick branches.
    """
    nf = len(g)
    D_lam, D_jump = [], []
    for i in range(nf):
        dl = np.zeros((3, 3))
        dj = np.zeros((3, 3))
        sn = 1.0 / max(1.0, beta_n[i])
        st = 1.0 / max(1.0, beta_t[i])
        zn = lam[i, 0] + beta_n[i] * jumps[3 * i]
        if zn > 0.0:  # contact active: C = -beta_n J_n
            dj[0, 0] = -beta_n[i] * sn
        else:  # open: C = lam_n
            dl[0, 0] = sn
        zt = lam[i, 1:] + beta_t[i] * jumps[3 * i + 1 : 3 * i + 3]
        nz = np.linalg.norm(zt)
        if nz <= g[i]:  # stick: C = -beta_t J_t
            dj[1:, 1:] = -beta_t[i] * st * np.eye(2)
        else:  # slip: C = lam_t - (g/|z|) z
            zh = zt / nz
            P = (g[i] / nz) * (np.eye(2) - np.outer(zh, zh))
            dl[1:, 1:] = st * (np.eye(2) - P)
            dj[1:, 1:] = -beta_t[i] * st * P
        D_lam.append(dl)
        D_jump.append(dj)
    return D_lam, D_jump


def classify_states(lam, jumps, g, tol=1e-8):
    """Contact state code per face.

    0 open-stick, 1 contact-stick, 2 open-slip, 3 contact-slip; a face is
    in contact when the normal jump vanishes within ``tol`` (relative to
    the data scale) and slipping when the friction bound is attained.
    """
    nf = len(g)
    states = np.empty(nf, dtype=int)
    scale = max(1.0, float(np.max(np.abs(lam), initial=0.0)),
                float(np.max(g, initial=0.0)))
    for i in range(nf):
        contact = abs(jumps[3 * i]) <= tol * scale
        lt = np.linalg.norm(lam[i, 1:])
        slipping = lt >= g[i] - tol * scale
        states[i] = (1 if contact else 0) + (2 if slipping else 0)
    return states


def newton_solve(system, config=None):
    """Solve the discrete contact problem by semi-smooth Newton iteration.

    The displacement block is eliminated against the multiplier through a
    monolithic linearized solve per iteration; steps are halved (up to
    ``max_halvings`` times) when the residual does not decrease.
    """
    if config is None:
        config = NewtonConfig()
    dofmap = system.dofmap
    mesh = dofmap.mesh
    fracture = system.fracture
    nf = fracture.n_faces
    free = system.free
    A_ff, rhs = reduced_system(system)
    lu = spla.splu(A_ff)

    if nf == 0:
        u_free = lu.solve(rhs)
        u = expand_solution(system, u_free)
        return ContactSolution(
            u=u, lam=np.zeros((0, 3)), lam_global=np.zeros((0, 3)),
            iterations=0, converged=True, residual_history=[0.0],
            states=np.zeros(0, dtype=int),
        )

    frames = _face_frames(mesh, fracture)
    Jfull = _jump_operator(system, frames)
    Jf = Jfull[:, free].tocsr()
    # coupling of the multiplier into the momentum residual:
    # int_f lam . jump(v) = |f| lam . (v_K - v_L)
    areas = np.repeat(mesh.face_area[fracture.face_ids], 3)
    C_mat = sp.diags(areas) @ Jf
    beta_n, beta_t = _default_beta(system, config)
    g = fracture.g

    u_free = lu.solve(rhs)
    lam = np.zeros((nf, 3))

    def residual(u_f, lam_):
        r1 = A_ff @ u_f + C_mat.T @ lam_.ravel() - rhs
        jumps = Jf @ u_f
        r2 = _complementarity(lam_, jumps, g, beta_n, beta_t)
        return r1, r2, jumps

    r1, r2, jumps = residual(u_free, lam)
    # residual scale: initial residual or the load itself, whichever is
    # larger, so that stiff problems are not held to an absolute target
    norm0 = max(np.linalg.norm(np.concatenate([r1, r2])),
                np.linalg.norm(rhs), config.abs_tol)
    history = [np.linalg.norm(np.concatenate([r1, r2]))]
    converged = history[0] <= config.abs_tol
    it = 0
    while not converged and it < config.max_iter:
        it += 1
        D_lam, D_jump = _generalized_jacobian(lam, jumps, g, beta_n, beta_t)
        Dl = sp.block_diag(D_lam, format="csr")
        Dj = sp.block_diag(D_jump, format="csr")
        Jac = sp.bmat(
            [[A_ff, C_mat.T], [Dj @ Jf, Dl]], format="csc"
        )
        step = spla.spsolve(Jac, -np.concatenate([r1, r2]))
        du = step[: len(u_free)]
        dlam = step[len(u_free):].reshape(nf, 3)
        alpha = 1.0
        cur = np.linalg.norm(np.concatenate([r1, r2]))
        for _ in range(config.max_halvings + 1):
            u_try = u_free + alpha * du
            lam_try = lam + alpha * dlam
            t1, t2, jt = residual(u_try, lam_try)
            if np.linalg.norm(np.concatenate([t1, t2])) < cur or \
                    alpha <= 0.5 ** config.max_halvings:
                break
            alpha *= 0.5
        u_free, lam, r1, r2, jumps = u_try, lam_try, t1, t2, jt
        res = np.linalg.norm(np.concatenate([r1, r2]))
        history.append(res)
        converged = res <= max(config.rel_tol * norm0, config.abs_tol)

    u = expand_solution(system, u_free)
    lam_global = np.einsum("ikc,ik->ic", frames, lam)
    states = classify_states(lam, jumps, g)
    return ContactSolution(
        u=u, lam=lam, lam_global=lam_global, iterations=it,
        converged=converged, residual_history=history, states=states,
    )
