"""Polytopal discrete de Rham scheme for elasticity with frictional contact.

The package discretizes 3D linear elasticity on polyhedral meshes cut by
planar fracture networks.  Displacements live in a second-order discrete
de Rham space with degrees of freedom duplicated on fracture entities,
contact and Tresca friction are enforced by face-wise Lagrange
multipliers, and the resulting complementarity system is solved with a
semi-smooth Newton method.
"""

from .mesh import (
    MeshError,
    FracturePlane,
    PolyMesh,
    FractureNetwork,
    build_cartesian,
    build_tetrahedral,
    build_hexacut,
    classify_fracture_sides,
    validate,
    write_polymesh,
    read_polymesh,
)
from .poly import (
    MonomialBasis,
    QuadRule,
    edge_quadrature,
    face_quadrature,
    cell_quadrature,
    l2_project,
    DEFAULT_ORDER,
)
from .spaces import (
    DofMap,
    CellOperators,
    build_cell_operators,
    build_all_operators,
    interpolate,
    jump_coeffs,
)
from .assembly import (
    MaterialParams,
    SystemBlocks,
    local_stiffness,
    assemble,
    apply_dirichlet,
)
from .contact import (
    NewtonConfig,
    ContactSolution,
    newton_solve,
    classify_states,
    project_plus,
    project_ball,
)
from .verification import (
    ManufacturedCase,
    ErrorRow,
    case_frictionless_61,
    case_tresca_62,
    case_incompressible_63,
    get_case,
    check_case,
    solve_case,
    compute_errors,
    convergence_study,
    write_csv,
    CSV_COLUMNS,
)

__version__ = "0.1.0"
