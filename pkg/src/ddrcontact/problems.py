"""Built-in demonstration problems without closed-form solutions.

These set up complete contact solves on meshes with one or several
fracture planes, driven by simple body forces, and are used to exercise
the solver and the contact-state classification on configurations where
all four states (open or contact, stick or slip) can occur.
"""

from __future__ import annotations

import numpy as np

from .assembly import MaterialParams, assemble, apply_dirichlet
from .contact import NewtonConfig, newton_solve
from .mesh import FracturePlane, build_cartesian, classify_fracture_sides
from .poly import DEFAULT_ORDER
from .spaces import DofMap, build_all_operators
from .verification import SolveResult

__all__ = ["two_fracture_compression"]


def two_fracture_compression(n=4, g=0.05, E=1.0, nu=0.3, newton=None,
                             order=DEFAULT_ORDER):
    """Cube with two intersecting fracture planes under a mixed load.

    The domain (-1, 1)^3 carries the fracture planes x = 0 and y = 0
    (intersecting along the z axis), clamped on the whole boundary and
    loaded by a vertical compression plus a lateral shear.  The load
    levels are chosen so that, for the default friction threshold, the
    converged solution exhibits open, sticking, and slipping faces.

    Returns a ``SolveResult``; the contact states are available as
    ``result.solution.states``.
    """
    planes = (FracturePlane("x", 0.0, g=g), FracturePlane("y", 0.0, g=g))
    mesh, fracture = build_cartesian(n, fracture_planes=planes)
    sides = classify_fracture_sides(mesh, fracture)
    dofmap = DofMap(mesh, sides, fracture)
    ops = build_all_operators(mesh, order)
    params = MaterialParams(E=E, nu=nu)

    def body_force(points, side=0):
        f = np.zeros((len(points), 3))
        f[:, 2] = -1.0
        f[:, 0] = 0.5 * np.sin(np.pi * points[:, 1]) * points[:, 2]
        f[:, 1] = 0.25 * np.cos(0.5 * np.pi * points[:, 0])
        return f

    system = assemble(mesh, dofmap, ops, params, fracture,
                      body_force=body_force)
    apply_dirichlet(system, g_D=None)
    solution = newton_solve(system, newton or NewtonConfig())
    return SolveResult(mesh, fracture, dofmap, ops, system, solution)
