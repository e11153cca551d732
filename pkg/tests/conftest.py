"""Shared fixtures: small meshes with operators and DOF maps."""

import numpy as np
import pytest

from ddrcontact.mesh import (
    FracturePlane,
    build_cartesian,
    build_tetrahedral,
    build_hexacut,
    classify_fracture_sides,
)
from ddrcontact.spaces import DofMap, build_all_operators


class Bundle:
    """Mesh together with its fracture, side classes, DOF map, operators."""

    def __init__(self, mesh, fracture):
        self.mesh = mesh
        self.fracture = fracture
        self.sides = classify_fracture_sides(mesh, fracture)
        self.dofmap = DofMap(mesh, self.sides, fracture)
        self.ops = build_all_operators(mesh)


@pytest.fixture(scope="session")
def cart2():
    """2x2x2 Cartesian mesh without fractures."""
    return Bundle(*build_cartesian(2))


@pytest.fixture(scope="session")
def cart2_frac():
    """2x2x2 Cartesian mesh with the fracture plane x = 0."""
    return Bundle(*build_cartesian(2, fracture_planes=(FracturePlane("x", 0.0),)))


@pytest.fixture(scope="session")
def tet1():
    """Six Kuhn tetrahedra filling the cube."""
    return Bundle(*build_tetrahedral(1))


@pytest.fixture(scope="session")
def hexacut2():
    """Perturbed 2x2x2 mesh with cut non-planar faces."""
    return Bundle(*build_hexacut(2, seed=0, magnitude=0.25))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
