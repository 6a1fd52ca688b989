"""
Unit tests for the surface, planar-set and curve file formats
Location: tests/test_surface_io.py
"""

import pytest

from geometry import corpus
from geometry.errors import PreconditionError, StructuralError, SurfaceParseError
from geometry.surface_core import EdgeRef, SurfacePoint, validate_surface
from geometry.surface_io import (
    edge_from_spec,
    edge_path_from_spec,
    parse_curve_file,
    parse_planar_set_file,
    parse_surface_file,
    parse_surface_text,
    point_from_spec,
    serialize_surface,
    write_surface_file,
)


# ============= FIXTURES =============

DANGLING = """\
polygon P0
0 0
1 0
1 1
0 1
pair P0.0 P0.2 sign=+1
"""


# ============= TEST 1: PARSING =============

def test_square_torus_file(data_dir):
    s = parse_surface_file(data_dir / "square_torus.hts")
    assert len(s.polygons) == 1
    assert s.polygons[0].name == "P0"
    assert len(s.pairings) == 2
    assert validate_surface(s).passed


def test_cylinder_file_has_horizontal_boundary(data_dir):
    s = parse_surface_file(data_dir / "cylinder_c1.hts")
    assert len(s.boundary) == 2
    assert all(b.kind == "horizontal" for b in s.boundary)


def test_every_corpus_file_parses(data_dir):
    table = corpus.load_corpus_table()
    for row in table.itertuples():
        assert validate_surface(parse_surface_file(data_dir / row.file)).passed, row.file


def test_dangling_pairing_names_the_edge():
    with pytest.raises(StructuralError) as exc:
        parse_surface_text(DANGLING)
    assert "edge_coverage" in str(exc.value)
    assert "P0.1" in str(exc.value)


def test_unvalidated_parse_keeps_broken_surface():
    s = parse_surface_text(DANGLING, validate=False)
    assert not validate_surface(s).passed


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("polygon P0\n0 zero\n", 2, 3),
        ("0 0\n", 1, 1),
        ("polygon P0\n0 0\n1 0\n1 1\npair P0.0 P0.9 sign=+1\n", 5, 11),
        ("polygon P0\n0 0\n1 0\n1 1\npair P0.0 P0.1 sign=2\n", 5, 16),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(SurfaceParseError) as exc:
        parse_surface_text(text)
    assert exc.value.line == line
    assert exc.value.column == column


# ============= TEST 2: ROUND TRIP =============

@pytest.mark.parametrize("name", ["square_torus", "octagon", "slit_cylinder", "two_rectangle_torus"])
def test_serialize_then_parse_is_identical(name):
    s = corpus.build(name)
    again = parse_surface_text(serialize_surface(s))
    assert again.polygons == s.polygons
    assert again.pairings == s.pairings
    assert again.boundary == s.boundary
    assert again.marked_points == s.marked_points


def test_marked_points_round_trip(two_rectangle_torus, tmp_path):
    path = write_surface_file(two_rectangle_torus, tmp_path / "marked.hts")
    again = parse_surface_file(path)
    assert [m.name for m in again.marked_points] == ["a", "b"]
    assert again.marked_points == two_rectangle_torus.marked_points


# ============= TEST 3: PLANAR SETS AND CURVES =============

def test_planar_set_files(data_dir):
    square = parse_planar_set_file(data_dir / "square.poly")
    assert len(square.outer) == 4
    annulus = parse_planar_set_file(data_dir / "square_annulus.poly")
    assert len(annulus.holes) == 1


def test_planar_set_rejects_unknown_loop(tmp_path):
    path = tmp_path / "bad.poly"
    path.write_text("loop inner\n0 0\n1 0\n0 1\n", encoding="utf-8")
    with pytest.raises(SurfaceParseError):
        parse_planar_set_file(path)


def test_curve_file_separates_limit(data_dir):
    curves, limit = parse_curve_file(data_dir / "octagon_ellipses.curve")
    assert len(curves) == 3
    assert limit is not None
    assert limit.size == 8


# ============= TEST 4: COMMAND-LINE REFERENCES =============

def test_point_and_edge_specs(two_rectangle_torus):
    p = point_from_spec(two_rectangle_torus, "R:0.75,0.5")
    assert p == SurfacePoint(1, 0.75 + 0.5j)
    assert point_from_spec(two_rectangle_torus, "0:0.25,0.5") == SurfacePoint(0, 0.25 + 0.5j)
    assert edge_from_spec(two_rectangle_torus, "L.3") == EdgeRef(0, 3)
    assert edge_path_from_spec(two_rectangle_torus, "L.0,R.0") == (EdgeRef(0, 0), EdgeRef(1, 0))


@pytest.mark.parametrize("spec", ["R:2,0.5", "R0.5,0.5", "X:0.1,0.1", "R:a,b"])
def test_bad_point_specs(two_rectangle_torus, spec):
    with pytest.raises(PreconditionError):
        point_from_spec(two_rectangle_torus, spec)
