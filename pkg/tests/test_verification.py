"""Manufactured cases: internal consistency, exact fields, CSV schema."""

import math

import numpy as np
import pytest

from ddrcontact.verification import (
    CSV_COLUMNS,
    ErrorRow,
    check_case,
    compute_errors,
    convergence_study,
    get_case,
    solve_case,
    write_csv,
)


@pytest.mark.parametrize("name,L", [("frictionless_61", None),
                                    ("tresca_62", None),
                                    ("incompressible_63", 1.0),
                                    ("incompressible_63", 1e4)])
def test_case_internal_consistency(name, L):
    """Traction balance, contact law, and FD force check of each case."""
    case = get_case(name, L=L)
    check_case(case)  # raises AssertionError on any violation


def test_unknown_case_rejected():
    with pytest.raises(ValueError):
        get_case("no_such_case")


def test_frictionless_normal_jump_closed_form(rng):
    """The normal jump of the frictionless case is -min(z, 0)^4."""
    case = get_case("frictionless_61")
    yz = rng.uniform(-1.0, 1.0, size=(40, 2))
    pts = np.column_stack([np.zeros(40), yz])
    jump = case.displacement(pts, 1) - case.displacement(pts, -1)
    jn = jump @ case.n_plus
    assert np.allclose(jn, -np.minimum(pts[:, 2], 0.0) ** 4, atol=1e-12)


def test_compute_errors_requires_convergence():
    case = get_case("frictionless_61")
    result = solve_case(case, "cartesian", 2)
    result.solution.converged = False
    with pytest.raises(RuntimeError):
        compute_errors(case, result)


def test_convergence_study_rejects_empty_levels():
    case = get_case("frictionless_61")
    with pytest.raises(ValueError):
        convergence_study(case, levels=())


def test_single_level_has_nan_orders():
    case = get_case("frictionless_61")
    rows = convergence_study(case, "cartesian", levels=(2,))
    assert len(rows) == 1
    assert math.isnan(rows[0].ord_u)
    assert rows[0].e_u > 0


def test_csv_schema_and_determinism(tmp_path):
    row = ErrorRow(case="frictionless_61", family="cartesian", level=1, n=2,
                   h=math.sqrt(3), n_cells=8, n_dofs=450, newton_iters=1,
                   e_u=1 / 3, e_jump=0.25, e_grad=0.125, e_lambda_n=0.1)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv([row], p1)
    write_csv([row], p2)
    text = p1.read_text()
    assert p1.read_bytes() == p2.read_bytes()
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    fields = lines[1].split(",")
    assert len(fields) == len(CSV_COLUMNS)
    # floats carry 12 significant digits
    assert fields[CSV_COLUMNS.index("e_u")] == "0.333333333333"
    assert fields[CSV_COLUMNS.index("ord_u")] == "nan"


def test_hexacut_solve_runs():
    """The perturbed family goes through the full pipeline."""
    case = get_case("tresca_62")
    result = solve_case(case, "hexacut", 2, seed=0, magnitude=0.25)
    assert result.solution.converged
    errors = compute_errors(case, result)
    assert all(np.isfinite(e) and e > 0 for e in errors)
