"""Mesh builders, invariants, fracture classification, POLYMESH IO."""

import numpy as np
import pytest

from ddrcontact.mesh import (
    FracturePlane,
    MeshError,
    build_cartesian,
    build_tetrahedral,
    build_hexacut,
    classify_fracture_sides,
    read_polymesh,
    validate,
    write_polymesh,
)


def test_cartesian_counts():
    mesh, fr = build_cartesian(2)
    assert mesh.n_cells == 8
    assert mesh.n_vertices == 27
    assert mesh.n_faces == 36
    assert mesh.n_edges == 54
    assert fr.n_faces == 0


def test_cartesian_fracture_faces():
    mesh, fr = build_cartesian(2, fracture_planes=(FracturePlane("x", 0.0),))
    assert fr.n_faces == 4
    for i, f in enumerate(fr.face_ids):
        assert abs(mesh.face_center[f][0]) < 1e-14
        # n_plus points along +x out of the positive-side cell
        assert fr.n_plus[i] @ np.array([1.0, 0, 0]) == pytest.approx(
            np.sign(-mesh.cell_center[fr.pos_cell[i]][0]))


def test_tetrahedral_counts():
    mesh, _ = build_tetrahedral(1)
    assert mesh.n_cells == 6
    assert mesh.n_vertices == 8
    # each cell closes up and has positive volume
    assert np.all(mesh.cell_volume > 0)
    assert mesh.cell_volume.sum() == pytest.approx(8.0)


@pytest.mark.parametrize("build", [build_cartesian, build_tetrahedral])
def test_volume_partition(build):
    mesh, _ = build(2)
    assert mesh.cell_volume.sum() == pytest.approx(8.0)
    assert np.all(mesh.face_area > 0)
    assert np.linalg.norm(mesh.face_normal, axis=1) == pytest.approx(1.0)


def test_hexacut_volume_and_determinism():
    mesh, _ = build_hexacut(3, seed=5, magnitude=0.2)
    assert mesh.cell_volume.sum() == pytest.approx(8.0)
    mesh2, _ = build_hexacut(3, seed=5, magnitude=0.2)
    assert np.array_equal(mesh.vertices, mesh2.vertices)
    mesh3, _ = build_hexacut(3, seed=6, magnitude=0.2)
    assert not np.array_equal(mesh.vertices, mesh3.vertices)


def test_hexacut_boundary_vertices_frozen():
    ref, _ = build_cartesian(3)
    per, _ = build_hexacut(3, seed=1, magnitude=0.25)
    on_bdry = np.max(np.abs(ref.vertices), axis=1) >= 1.0 - 1e-12
    # hexacut vertex ordering matches the Cartesian grid for grid vertices
    assert np.allclose(per.vertices[: len(ref.vertices)][on_bdry],
                       ref.vertices[on_bdry])


@pytest.mark.parametrize("build", [build_cartesian, build_tetrahedral])
def test_validate_clean(build):
    mesh, fr = build(2, fracture_planes=(FracturePlane("x", 0.0),))
    report = validate(mesh, fr)
    assert bool(report), report.issues


def test_validate_hexacut():
    mesh, fr = build_hexacut(2, fracture_planes=(FracturePlane("x", 0.0),),
                             seed=0, magnitude=0.25)
    report = validate(mesh, fr)
    assert bool(report), report.issues


def test_validate_detects_broken_orientation():
    mesh, _ = build_cartesian(1)
    mesh.cell_face_sign[0] = [-s for s in mesh.cell_face_sign[0]]
    report = validate(mesh)
    assert not report
    assert any(kind == "cell" for kind, _, _ in report.issues)


def test_negative_threshold_rejected():
    with pytest.raises(MeshError):
        build_cartesian(2, fracture_planes=(FracturePlane("x", 0.0, g=-1.0),))


def test_side_classification_duplicates_fracture_entities():
    mesh, fr = build_cartesian(2, fracture_planes=(FracturePlane("x", 0.0),))
    sides = classify_fracture_sides(mesh, fr)
    n_dup_v = sum(len(c) - 1 for c in sides.vertex_classes)
    n_dup_e = sum(len(c) - 1 for c in sides.edge_classes)
    # all 9 plane vertices and all 12 plane edges split in two
    assert n_dup_v == 9
    assert n_dup_e == 12
    for i, f in enumerate(fr.face_ids):
        assert len(sides.face_sides[f]) == 2
    # off-plane faces keep a single side
    n_split_faces = sum(1 for fs in sides.face_sides if len(fs) == 2)
    assert n_split_faces == fr.n_faces


def test_polymesh_roundtrip(tmp_path):
    mesh, fr = build_hexacut(2, fracture_planes=(FracturePlane("x", 0.0),),
                             seed=3, magnitude=0.2)
    path = tmp_path / "m.poly"
    write_polymesh(path, mesh, fr)
    mesh2, fr2 = read_polymesh(path)
    assert np.allclose(mesh.vertices, mesh2.vertices)
    assert mesh.n_cells == mesh2.n_cells
    for f in range(mesh.n_faces):
        assert list(mesh.face_loops[f]) == list(mesh2.face_loops[f])
    for K in range(mesh.n_cells):
        assert list(mesh.cell_faces[K]) == list(mesh2.cell_faces[K])
        assert list(mesh.cell_face_sign[K]) == list(mesh2.cell_face_sign[K])
    assert np.array_equal(fr.face_ids, fr2.face_ids)
    assert np.allclose(fr.n_plus, fr2.n_plus)
    assert np.array_equal(fr.pos_cell, fr2.pos_cell)
    assert np.allclose(fr.g, fr2.g)
    assert bool(validate(mesh2, fr2))


def test_polymesh_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.poly"
    path.write_text("POLYMESH 2\nVERTICES 0\n")
    with pytest.raises(MeshError):
        read_polymesh(path)


def test_fracture_plane_must_lie_on_grid():
    with pytest.raises(MeshError):
        build_cartesian(2, fracture_planes=(FracturePlane("x", 0.3),))
