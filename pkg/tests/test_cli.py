"""
Unit tests for the command line: exit codes, JSON output and map files
Location: tests/test_cli.py
"""

import argparse
import json

import pytest

from cli.main import build_parser, main
from cli.routes import SUBCOMMANDS, exit_code_for, route_inputs
from cli.schema import MapInterchange, RunConfig, load_map_file
from geometry.errors import SurfaceParseError
from geometry.qc_maps import dilatation_of, shear_dilatation, stretch_map


# ============= FIXTURES =============

@pytest.fixture
def broken_surface(tmp_path):
    path = tmp_path / "broken.hts"
    path.write_text("polygon P0\n0 0\n1 0\n1 1\n0 1\npair P0.0 P0.2 sign=+1\n", encoding="utf-8")
    return path


# ============= TEST 1: EXIT CODES =============

def test_exit_zero_on_pass(capsys):
    assert main(["validate", "--surface", "octagon"]) == 0
    assert capsys.readouterr().out.startswith("validate: pass")


def test_exit_zero_on_computation(capsys):
    assert main(["extension", "--hx", "1", "--hy", "2"]) == 0
    assert main(["push", "--radius", "1", "--displacement", "0.1+0.05j"]) == 0
    assert "computed" in capsys.readouterr().out


def test_exit_one_on_failed_verdict(broken_surface, capsys):
    assert main(["validate", "--surface", str(broken_surface)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_exit_two_on_precondition(capsys):
    assert main(["extension", "--hx", "2", "--hy", "1"]) == 2
    assert "PreconditionError" in capsys.readouterr().err


def test_exit_three_on_missing_file(tmp_path, capsys):
    assert main(["el", "--surface", str(tmp_path / "missing.hts")]) == 3
    assert "FileNotFoundError" in capsys.readouterr().err


def test_exit_three_on_structural_load(broken_surface):
    assert main(["el", "--surface", str(broken_surface)]) == 3


def test_exit_three_on_parse_error(tmp_path):
    bad = tmp_path / "bad.hts"
    bad.write_text("polygon P0\n0 zero\n", encoding="utf-8")
    assert main(["validate", "--surface", str(bad)]) == 3


def test_exit_code_table():
    assert exit_code_for({"status": "COMPLETED", "verdict": None}) == 0
    assert exit_code_for({"status": "COMPLETED", "verdict": False}) == 1
    assert exit_code_for({"status": "FAILED", "error_type": "CollisionError", "failed_at": "SurgeryAgent"}) == 2
    assert exit_code_for({"status": "FAILED", "error_type": "StructuralError", "failed_at": "SurfaceAgent"}) == 2
    assert exit_code_for({"status": "FAILED", "error_type": "SurfaceParseError", "failed_at": "Load"}) == 3


# ============= TEST 2: JSON OUTPUT =============

def test_json_output_is_reproducible(capsys):
    """
    Validates:
    - --json writes the envelope with the seed and verdict
    - the same seed gives byte-identical output
    """
    argv = ["grunsky", "--z", "0.4", "--samples", "300", "--json", "--seed", "3"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second

    data = json.loads(first)
    assert data["subcommand"] == "grunsky"
    assert data["seed"] == 3
    assert data["verdict"] is True


def test_global_options_after_subcommand(capsys):
    assert main(["--json", "extension", "--hx", "1", "--hy", "2"]) == 0
    before = json.loads(capsys.readouterr().out)
    assert main(["extension", "--hx", "1", "--hy", "2", "--json"]) == 0
    after = json.loads(capsys.readouterr().out)
    assert before == after


def test_json_error_envelope(capsys):
    assert main(["extension", "--hx", "2", "--hy", "1", "--json"]) == 2
    data = json.loads(capsys.readouterr().out)
    assert data["failed_at"] == "SurgeryAgent"
    assert data["hypothesis"] == "hX<=hY"
    assert data["exit_code"] == 2


@pytest.mark.parametrize("argv", [
    ["validate", "--surface", "octagon"],
    ["gaussbonnet", "--surface", "square_torus", "--subdivisions", "2"],
    ["geodesic", "--surface", "square_torus", "--from", "P0:0.1,0.1", "--to", "P0:0.4,0.5"],
    ["divergence", "--surface", "square_torus",
     "--x0", "P0:0.2,0.2", "--x1", "P0:0.6,0.2", "--y0", "P0:0.2,0.6", "--y1", "P0:0.6,0.6"],
    ["el", "--surface", "cylinder_c2"],
    ["modulus", "--height", "1", "--width", "2", "--grid-h", "0.03125"],
    ["stretch", "--surface", "square_torus", "--K", "2"],
    ["dilatation", "--shear", "0.5"],
    ["dilatation", "--K", "2"],
    ["slit", "--surface", "cylinder_c1", "--start", "0:0.2,0.5", "--length", "0.5"],
    ["unfold", "--surface", "slit_cylinder"],
    ["enlarge", "--surface", "cylinder_c1", "--r", "0.5"],
    ["extension", "--hx", "1", "--hy", "2"],
    ["cover", "--surface", "square_torus", "--loop", "P0.0"],
    ["flow", "--surface", "slit_cylinder", "--codomain", "cylinder_c1", "--samples", "3"],
    ["grunsky", "--z", "0.5", "--samples", "200"],
    ["residue", "--angles", "360"],
    ["blob-cylinder", "--hx", "1", "--hy", "2", "--height", "0.5", "--samples", "8", "--grid-h", "0.03125"],
    ["semismooth", "--set", "square"],
    ["reparam", "--curves", "ellipses"],
])
def test_every_verdict_carries_its_tolerance(argv, capsys):
    """
    Validates:
    - each checked statement reports the tolerance it was decided with
    - the envelope repeats that tolerance when --tol is not given
    """
    assert main(argv + ["--json"]) in (0, 1)
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] is not None
    assert data["tolerance"] > 0
    assert data["report"]["tolerance"] == data["tolerance"]


def test_tol_option_reaches_the_verdict(capsys):
    assert main(["el", "--surface", "cylinder_c2", "--tol", "1e-6", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["tolerance"] == 1e-6
    assert data["report"]["tolerance"] == 1e-6


def test_plain_computation_has_no_tolerance(capsys):
    assert main(["push", "--radius", "1", "--displacement", "0.9", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] is None
    assert data["tolerance"] is None


def test_svg_option_writes_figure(tmp_path, capsys):
    target = tmp_path / "torus.svg"
    assert main(["geodesic", "--surface", "square_torus", "--from", "P0:0.1,0.1", "--to", "P0:0.4,0.5",
                 "--svg", str(target)]) == 0
    assert capsys.readouterr().out.strip() == str(target)
    assert "<svg" in target.read_text(encoding="utf-8")


# ============= TEST 3: PARSER AND ROUTES =============

def test_every_subcommand_is_parsed():
    parser = build_parser()
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    assert set(subparsers.choices) == set(SUBCOMMANDS)


def test_route_inputs_drops_globals():
    args = vars(build_parser().parse_args(["stretch", "--surface", "square_torus", "--K", "2", "--seed", "9"]))
    inputs = route_inputs(args)
    assert inputs["surface"] == "square_torus"
    assert inputs["K"] == 2.0
    assert "seed" not in inputs and "subcommand" not in inputs


def test_run_config_rejects_bad_values():
    with pytest.raises(ValueError):
        RunConfig(subcommand="teleport")
    with pytest.raises(ValueError):
        RunConfig(subcommand="validate", seed=-1)
    with pytest.raises(ValueError):
        RunConfig(subcommand="validate", tolerance=0.0)


# ============= TEST 4: MAP INTERCHANGE =============

def test_shear_map_file(data_dir, square_torus):
    m = load_map_file(data_dir / "shear_map.json").to_map(square_torus)
    assert dilatation_of(m) == pytest.approx(shear_dilatation(0.5))


def test_map_file_round_trip(square_torus):
    _, m = stretch_map(square_torus, 2.0)
    again = MapInterchange.from_map(m).to_map(square_torus)
    assert dilatation_of(again) == pytest.approx(2.0)


def test_malformed_map_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"faces": [{"matrix": [[1, 0]]}]}', encoding="utf-8")
    with pytest.raises(SurfaceParseError, match="matrix"):
        load_map_file(bad)


def test_dilatation_subcommand_reads_map(data_dir, capsys):
    code = main(["dilatation", "--map", str(data_dir / "shear_map.json"), "--surface", "square_torus", "--json"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["report"]["dilatation"] == pytest.approx(shear_dilatation(0.5))
