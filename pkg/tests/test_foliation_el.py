"""
Unit tests for foliations, extremal length, heights and the modulus oracle
Location: tests/test_foliation_el.py
"""

import math

import pytest

from geometry import corpus
from geometry.errors import PreconditionError
from geometry.foliation_el import (
    HORIZONTAL_FOLIATION,
    VERTICAL_FOLIATION,
    annulus_modulus_numeric,
    compatibility_residual,
    conductor_from_planar_set,
    cylinder_conductor,
    cylinder_cross_cut_class,
    dirichlet_energy,
    el_monotonicity_check,
    extremal_length_of_structure,
    extremal_length_upper_bound,
    foliation_from_differential,
    height_of_class,
    loop_class,
    pushforward_foliation,
    rectangle_conductor,
    refine_foliation,
    round_annulus,
    scale_foliation,
)
from geometry.qc_maps import identity_map, stretch_map
from geometry.surface_core import SurfacePoint, area
from geometry.surface_io import parse_planar_set_file


# ============= TEST 1: EXTREMAL LENGTH OF THE STRUCTURE =============

@pytest.mark.parametrize("name", ["square_torus", "octagon", "tilted_torus", "pillowcase", "cylinder_c2"])
def test_extremal_length_equals_area(name):
    s = corpus.build(name)
    report = extremal_length_of_structure(s)
    assert report.exact
    assert report.value == pytest.approx(area(s), rel=1e-9)
    assert report.label == "extremal length"


def test_vertical_foliation_has_same_extremal_length(octagon):
    report = extremal_length_of_structure(octagon, VERTICAL_FOLIATION)
    assert report.value == pytest.approx(area(octagon), rel=1e-9)


def test_structure_foliation_is_compatible(pillowcase):
    f = foliation_from_differential(pillowcase)
    assert compatibility_residual(f) < 1e-9


def test_unknown_orientation_is_rejected(square_torus):
    with pytest.raises(PreconditionError) as exc:
        foliation_from_differential(square_torus, "diagonal")
    assert exc.value.hypothesis == "orientation"


def test_refinement_keeps_energy(square_torus):
    f = foliation_from_differential(square_torus)
    fine = refine_foliation(f, 3)
    assert fine.triangles == 9 * f.triangles
    assert dirichlet_energy(fine) == pytest.approx(dirichlet_energy(f), rel=1e-12)


# ============= TEST 2: MONOTONICITY UNDER STRETCHES =============

def test_stretch_attains_the_bound_on_horizontal_foliation(square_torus):
    _, m = stretch_map(square_torus, 2.0)
    report = el_monotonicity_check(foliation_from_differential(square_torus, HORIZONTAL_FOLIATION), m, 2.0)
    assert report.passed
    assert report.equality
    assert report.energy_after == pytest.approx(2.0)


def test_stretch_shrinks_vertical_foliation(square_torus):
    _, m = stretch_map(square_torus, 2.0)
    report = el_monotonicity_check(foliation_from_differential(square_torus, VERTICAL_FOLIATION), m, 2.0)
    assert report.passed
    assert not report.equality
    assert report.energy_after == pytest.approx(0.5)


def test_monotonicity_needs_k_quasiconformal_map(square_torus):
    _, m = stretch_map(square_torus, 3.0)
    with pytest.raises(PreconditionError) as exc:
        el_monotonicity_check(foliation_from_differential(square_torus), m, 2.0)
    assert exc.value.hypothesis == "K-quasiconformal"


def test_pushforward_by_identity_is_unchanged(square_torus):
    f = foliation_from_differential(square_torus)
    pushed = pushforward_foliation(f, identity_map(square_torus))
    assert (pushed.values == f.values).all()
    assert area(pushed.surface) == pytest.approx(area(f.surface))
    assert dirichlet_energy(pushed) == pytest.approx(dirichlet_energy(f))


def test_pushforward_by_stretch_keeps_heights(square_torus):
    _, m = stretch_map(square_torus, 2.0)
    pushed = pushforward_foliation(foliation_from_differential(square_torus, HORIZONTAL_FOLIATION), m)
    assert area(pushed.surface) == pytest.approx(2.0)
    assert dirichlet_energy(pushed) == pytest.approx(2.0)


def test_pushforward_needs_a_composable_map(square_torus, octagon):
    with pytest.raises(PreconditionError) as exc:
        pushforward_foliation(foliation_from_differential(square_torus), identity_map(octagon))
    assert exc.value.hypothesis == "composable"


# ============= TEST 3: HEIGHTS OF CURVE CLASSES =============

def test_horizontal_loop_heights(square_torus):
    """
    Validates:
    - a horizontal loop crosses the vertical foliation once around
    - it is a leaf of the horizontal foliation, so its height there is zero
    """
    loop = [SurfacePoint(0, 0j), SurfacePoint(0, 1 + 0j)]
    vertical = foliation_from_differential(square_torus, VERTICAL_FOLIATION)
    report = height_of_class(vertical, loop_class(vertical, loop))
    assert report.height == pytest.approx(1.0)
    assert report.stabilized

    horizontal = foliation_from_differential(square_torus, HORIZONTAL_FOLIATION)
    assert height_of_class(horizontal, loop_class(horizontal, loop)).height == pytest.approx(0.0, abs=1e-12)


def test_cross_cut_height_is_cylinder_height():
    c2 = corpus.build("cylinder_c2")
    f = foliation_from_differential(c2)
    report = height_of_class(f, cylinder_cross_cut_class(f))
    assert report.height == pytest.approx(2.0)


def test_loop_must_follow_mesh_edges(square_torus):
    f = foliation_from_differential(square_torus)
    with pytest.raises(PreconditionError) as exc:
        loop_class(f, [SurfacePoint(0, 0.3 + 0.3j), SurfacePoint(0, 1 + 0j)])
    assert exc.value.hypothesis == "representative on mesh"


# ============= TEST 4: MODULUS ORACLE =============

@pytest.mark.parametrize("height", [0.5, 1.0, 2.0])
def test_cylinder_modulus_is_its_height(height):
    report = annulus_modulus_numeric(cylinder_conductor(height))
    assert report.modulus == pytest.approx(height, rel=1e-6)


def test_round_annulus_modulus():
    report = annulus_modulus_numeric(round_annulus(1.0, math.e))
    assert report.modulus == pytest.approx(1 / (2 * math.pi), rel=1e-6)


def test_rectangle_conductor_modulus():
    report = annulus_modulus_numeric(rectangle_conductor(2.0, 1.0), grid_h=1 / 32)
    assert report.modulus == pytest.approx(0.5, rel=1e-6)


def test_square_annulus_between_round_annuli(data_dir):
    domain = conductor_from_planar_set(parse_planar_set_file(data_dir / "square_annulus.poly"))
    report = annulus_modulus_numeric(domain, grid_h=4 / 128)
    assert math.log(math.sqrt(2)) / (2 * math.pi) < report.modulus < math.log(2 * math.sqrt(2)) / (2 * math.pi)


def test_coarse_grid_is_rejected(data_dir):
    domain = conductor_from_planar_set(parse_planar_set_file(data_dir / "square_annulus.poly"))
    with pytest.raises(PreconditionError) as exc:
        annulus_modulus_numeric(domain, grid_h=3.0)
    assert exc.value.hypothesis == "grid resolves boundaries"


def test_conductor_needs_one_hole(data_dir):
    with pytest.raises(PreconditionError):
        conductor_from_planar_set(parse_planar_set_file(data_dir / "square.poly"))


def test_round_annulus_needs_ordered_radii():
    with pytest.raises(PreconditionError):
        round_annulus(2.0, 1.0)


def test_scaled_foliation_energy_is_quadratic(square_torus):
    f = foliation_from_differential(square_torus)
    bound = extremal_length_upper_bound(scale_foliation(f, 3.0))
    assert not bound.exact
    assert bound.area is None
    assert bound.value == pytest.approx(9.0 * dirichlet_energy(f))
