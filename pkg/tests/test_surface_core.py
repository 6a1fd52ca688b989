"""
Unit tests for surface structure, cone points and Gauss-Bonnet
Location: tests/test_surface_core.py
"""

import math

import pytest

from agents.surface_agent import random_subdivision
from geometry import corpus
from geometry.errors import PreconditionError
from geometry.surface_core import (
    FREE,
    BoundaryEdge,
    EdgeRef,
    HalfTranslationSurface,
    Isometry,
    Pairing,
    Polygon,
    SurfacePoint,
    area,
    boundary_components,
    canonicalize_point,
    cone_points,
    euler_characteristic,
    gauss_bonnet_global,
    relabel,
    split_edge,
    subdivide,
    triangulate,
    validate_surface,
)

UNIT_SQUARE = Polygon((0, 1, 1 + 1j, 1j), "P0")


# ============= TEST 1: CORPUS INVARIANTS =============

@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_corpus_surfaces_validate(name):
    report = validate_surface(corpus.build(name))
    assert report.passed, report.failures


def test_corpus_table_matches_builders():
    """
    Validates:
    - corpus.csv lists every builder
    - area and Euler characteristic agree with the table
    """
    table = corpus.load_corpus_table()
    assert set(table["name"]) == set(corpus.CORPUS)
    for row in table.itertuples():
        s = corpus.build(row.name)
        assert area(s) == pytest.approx(row.expected_area, abs=1e-12), row.name
        assert euler_characteristic(s) == row.expected_chi, row.name


@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_gauss_bonnet_balances_on_corpus(name):
    result = gauss_bonnet_global(corpus.build(name))
    assert abs(result.residual) < 1e-9
    assert result.passed


def _balance_under_subdivision(name, rng, count):
    s = corpus.build(name)
    chi = euler_characteristic(s)
    for _ in range(count):
        s = random_subdivision(s, rng)
        result = gauss_bonnet_global(s)
        assert abs(result.residual) < 1e-9
        assert result.chi == chi


@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_corpus_balances_under_subdivision(name, rng):
    _balance_under_subdivision(name, rng, 10)


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_corpus_balances_under_hundred_subdivisions(name, rng):
    _balance_under_subdivision(name, rng, 100)


# ============= TEST 2: CONE POINTS =============

def test_octagon_has_one_six_pi_point(octagon):
    cones = cone_points(octagon)
    assert len(cones) == 1
    assert cones[0].total_angle == pytest.approx(6 * math.pi, abs=1e-9)
    assert cones[0].prongs == 6
    assert cones[0].singular


def test_pillowcase_has_four_pi_points(pillowcase):
    cones = cone_points(pillowcase)
    assert len(cones) == 4
    assert all(c.prongs == 1 and c.singular for c in cones)


def test_square_torus_is_flat(square_torus):
    cones = cone_points(square_torus)
    assert len(cones) == 1
    assert cones[0].prongs == 2
    assert not cones[0].singular


# ============= TEST 3: VALIDATION FAILURES =============

def test_dangling_pairing_names_uncovered_edges():
    s = HalfTranslationSurface((UNIT_SQUARE,), (Pairing(EdgeRef(0, 0), EdgeRef(0, 2), 1),))
    report = validate_surface(s)
    assert not report.passed
    failure = next(f for f in report.failures if f["invariant"] == "edge_coverage")
    assert failure["elements"] == ["0.1", "0.3"]


def test_wrong_pairing_sign_is_reported():
    s = HalfTranslationSurface(
        (UNIT_SQUARE,),
        (Pairing(EdgeRef(0, 0), EdgeRef(0, 2), -1), Pairing(EdgeRef(0, 1), EdgeRef(0, 3), 1)),
    )
    report = validate_surface(s)
    assert not report.passed
    assert report.checks["pairing_vector"] is False


def test_clockwise_polygon_fails_orientation():
    clockwise = Polygon((0, 1j, 1 + 1j, 1), "cw")
    s = HalfTranslationSurface((clockwise,), (Pairing(EdgeRef(0, 0), EdgeRef(0, 2), 1), Pairing(EdgeRef(0, 1), EdgeRef(0, 3), 1)))
    assert validate_surface(s).checks["polygon_orientation"] is False


def test_gauss_bonnet_needs_horizontal_boundary():
    s = HalfTranslationSurface((UNIT_SQUARE,), (), tuple(BoundaryEdge(EdgeRef(0, i), FREE) for i in range(4)))
    with pytest.raises(PreconditionError) as exc:
        gauss_bonnet_global(s)
    assert exc.value.hypothesis == "horizontal boundary"


# ============= TEST 4: GLUING MAPS =============

def test_gluing_map_translates_bottom_to_top(square_torus):
    partner, phi = square_torus.gluing_map(EdgeRef(0, 0))
    assert partner == EdgeRef(0, 2)
    assert phi.sign == 1
    assert phi(0.5) == pytest.approx(0.5 + 1j)


def test_isometry_compose_and_inverse():
    phi = Isometry(-1, 2 + 1j)
    psi = Isometry(1, -0.5j)
    z = 0.3 + 0.7j
    assert phi.compose(phi.inverse())(z) == pytest.approx(z)
    assert phi.compose(psi)(z) == pytest.approx(phi(psi(z)))
    assert phi.vector(1j) == -1j


def test_canonicalize_moves_top_edge_point_down(square_torus):
    point = canonicalize_point(square_torus, SurfacePoint(0, 0.5 + 1j))
    assert point.polygon_id == 0
    assert point.position == pytest.approx(0.5)


# ============= TEST 5: SUBDIVISION AND RELABELLING =============

def test_subdivide_square_torus(square_torus):
    cut = subdivide(square_torus, 0, 0, 2)
    assert len(cut.polygons) == 2
    assert validate_surface(cut).passed
    assert area(cut) == pytest.approx(1.0)
    assert abs(gauss_bonnet_global(cut).residual) < 1e-9


def test_subdivide_rejects_adjacent_vertices(square_torus):
    with pytest.raises(PreconditionError):
        subdivide(square_torus, 0, 0, 1)


def test_split_edge_splits_partner_too(square_torus):
    split = split_edge(square_torus, EdgeRef(0, 0), 0.25)
    assert split.polygons[0].n == 6
    assert validate_surface(split).passed
    assert euler_characteristic(split) == 0


def test_triangulate_keeps_area(octagon):
    tri = triangulate(octagon)
    assert all(p.n == 3 for p in tri.surface.polygons)
    assert len(tri.surface.polygons) == 6
    assert validate_surface(tri.surface).passed
    assert area(tri.surface) == pytest.approx(area(octagon), abs=1e-12)
    assert euler_characteristic(tri.surface) == -2


def test_relabel_preserves_invariants(two_rectangle_torus):
    swapped = relabel(two_rectangle_torus, [1, 0])
    assert [p.name for p in swapped.polygons] == ["R", "L"]
    assert validate_surface(swapped).passed
    assert area(swapped) == pytest.approx(area(two_rectangle_torus))
    with pytest.raises(PreconditionError):
        relabel(two_rectangle_torus, [0, 0])


# ============= TEST 6: BOUNDARY =============

def test_cylinder_has_two_boundary_circles(cylinder_c1):
    assert len(boundary_components(cylinder_c1)) == 2


def test_slit_adds_a_boundary_circle(slit_cylinder):
    assert len(boundary_components(slit_cylinder)) == 3
    assert euler_characteristic(slit_cylinder) == -1
