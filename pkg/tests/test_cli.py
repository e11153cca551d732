"""Command-line interface: exit codes, config files, CSV, mesh export."""

import numpy as np
import pytest

from ddrcontact.cli import main
from ddrcontact.mesh import read_polymesh, validate


def test_run_tresca(capsys):
    assert main(["run", "--case", "tresca_62", "--n", "2"]) == 0
    out = capsys.readouterr().out
    assert "newton iterations" in out
    assert "contact states" in out
    assert "e_u=" in out


def test_run_two_fractures(capsys):
    assert main(["run", "--case", "two_fractures", "--n", "2"]) == 0
    out = capsys.readouterr().out
    assert "contact states" in out
    assert "e_u=" not in out  # no closed-form solution, no error row


def test_unknown_flag_is_config_error():
    assert main(["run", "--frobnicate"]) == 1


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("bogus.key = 1\n")
    assert main(["run", "--config", str(cfg)]) == 1
    assert "unknown key" in capsys.readouterr().err


def test_malformed_config_line(tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("just some words\n")
    assert main(["run", "--config", str(cfg)]) == 1


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("run.case = tresca_62\nmesh.n = 2\n")
    assert main(["mesh-info", "--family", "cartesian", "--n", "2"]) == 0
    capsys.readouterr()
    assert main(["run", "--config", str(cfg), "--case", "frictionless_61"]) == 0
    assert "case=frictionless_61" in capsys.readouterr().out


def test_material_override_rejected_for_manufactured_case(capsys):
    assert main(["run", "--case", "tresca_62", "--n", "2", "--E", "2.0"]) == 1
    assert "two_fractures" in capsys.readouterr().err


def test_convergence_empty_levels():
    assert main(["convergence", "--case", "frictionless_61",
                 "--levels", ""]) == 1


def test_convergence_requires_levels():
    assert main(["convergence", "--case", "frictionless_61"]) == 1


def test_convergence_csv_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["convergence", "--case", "frictionless_61",
                     "--levels", "2", "--out", str(path)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().split("\n", 1)[0]
    assert header.startswith("case,family,level,n,h,")


def test_mesh_info(capsys):
    assert main(["mesh-info", "--family", "tetrahedral", "--n", "2",
                 "--case", "tresca_62"]) == 0
    out = capsys.readouterr().out
    assert "cells:          48" in out
    assert "fracture faces: 8" in out


def test_export_mesh_roundtrip(tmp_path, capsys):
    path = tmp_path / "m.poly"
    assert main(["export-mesh", "--family", "hexacut", "--n", "2",
                 "--case", "frictionless_61", "--out", str(path)]) == 0
    mesh, fr = read_polymesh(path)
    assert bool(validate(mesh, fr))
    assert fr.n_faces == 4


def test_export_mesh_requires_out():
    assert main(["export-mesh", "--family", "cartesian", "--n", "2"]) == 1


def test_checks_quick(capsys):
    assert main(["checks", "--samples", "1"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5


def test_checks_fault_injection(capsys):
    assert main(["checks", "--samples", "1",
                 "--debug-stab-face-scale", "2.0"]) == 2
    assert "FAIL" in capsys.readouterr().out


def test_ddr_threads_validation(monkeypatch):
    monkeypatch.setenv("DDR_THREADS", "zero")
    assert main(["mesh-info", "--n", "1"]) == 1
    monkeypatch.setenv("DDR_THREADS", "2")
    assert main(["mesh-info", "--n", "1"]) == 0
