"""
Unit tests for slits, enlargement, double covers and the horizontal flow
Location: tests/test_surgery.py
"""

import numpy as np
import pytest

from geometry import corpus
from geometry.errors import CollisionError, PreconditionError
from geometry.foliation_el import (
    HORIZONTAL_FOLIATION,
    VERTICAL_FOLIATION,
    dirichlet_energy,
    foliation_from_differential,
)
from geometry.surface_core import (
    EdgeRef,
    SurfacePoint,
    area,
    boundary_components,
    euler_characteristic,
    gauss_bonnet_global,
    validate_surface,
)
from geometry.surgery import (
    CoverSpec,
    EnlargementSpec,
    SlitSpec,
    cut_slit,
    cylinder_modulus,
    double_cover_branched,
    extension_search,
    flow_clearance,
    glue_cylinders,
    horizontal_flow_family,
    modulus_of_extension_cylinder,
    slit_boundary_tips,
    unfold_slit,
)


# ============= TEST 1: SLITS =============

def test_cut_slit_in_cylinder(cylinder_c1):
    """
    Validates:
    - cutting a slit adds one boundary circle and lowers chi by one
    - area and Gauss-Bonnet survive the cut
    """
    cut = cut_slit(cylinder_c1, SlitSpec(SurfacePoint(0, 0.2 + 0.5j), 0.5))
    assert validate_surface(cut).passed
    assert len(boundary_components(cut)) == 3
    assert euler_characteristic(cut) == -1
    assert area(cut) == pytest.approx(1.0)
    assert abs(gauss_bonnet_global(cut).residual) < 1e-9
    assert len(slit_boundary_tips(cut)) == 2


def test_slit_must_have_length(cylinder_c1):
    with pytest.raises(PreconditionError) as exc:
        cut_slit(cylinder_c1, SlitSpec(SurfacePoint(0, 0.2 + 0.5j), 0.0))
    assert exc.value.hypothesis == "length>0"


def test_slit_must_avoid_boundary(cylinder_c1):
    with pytest.raises(PreconditionError):
        cut_slit(cylinder_c1, SlitSpec(SurfacePoint(0, 0.2 + 0j), 0.3))


def test_slit_tips_have_two_prongs(slit_cylinder):
    tips = slit_boundary_tips(slit_cylinder)
    assert len(tips) == 2
    assert all(t.prongs == 2 for t in tips)


def test_unfold_doubles_prongs(slit_cylinder):
    report = unfold_slit(slit_cylinder, SurfacePoint(0, 0.6 + 0.5j))
    assert report.original_prongs == 2
    assert report.unfolded_prongs == 4
    assert report.zero_order == 2
    assert report.pullback == "4*w**2"
    assert report.pullback_ok


def test_unfold_needs_a_slit_tip(slit_cylinder):
    with pytest.raises(PreconditionError) as exc:
        unfold_slit(slit_cylinder, SurfacePoint(0, 0j))
    assert exc.value.hypothesis == "slit endpoint"


# ============= TEST 2: ENLARGEMENT =============

def test_glue_cylinders_grows_modulus(cylinder_c1):
    big = glue_cylinders(cylinder_c1, EnlargementSpec(0.5))
    assert validate_surface(big).passed
    assert len(boundary_components(big)) == 2
    assert area(big) == pytest.approx(2.0)
    assert cylinder_modulus(big) == pytest.approx(2.0)


def test_zero_enlargement_is_identity(cylinder_c1):
    assert glue_cylinders(cylinder_c1, EnlargementSpec(0.0)) is cylinder_c1


def test_enlargement_needs_circle_boundary(slit_cylinder):
    with pytest.raises(PreconditionError) as exc:
        glue_cylinders(slit_cylinder, EnlargementSpec(0.1))
    assert exc.value.hypothesis == "circle boundary"


@pytest.mark.parametrize("hX, hY", [(1.0, 2.0), (0.5, 0.75), (2.0, 2.0)])
def test_extension_search_matches_closed_form(hX, hY):
    report = extension_search(hX, hY)
    assert report.expected == pytest.approx((hY - hX) / 2)
    assert report.r == pytest.approx(report.expected, abs=1e-9)


def test_extension_search_on_random_heights(rng):
    """
    Validates:
    - the searched modulus agrees with (hY - hX) / 2 on twenty height pairs
    - gluing that modulus onto C(hX) fills C(hY) with no area left over
    """
    for _ in range(20):
        hX = float(rng.uniform(0.1, 2.0))
        hY = hX + float(rng.uniform(0.0, 2.0))
        report = extension_search(hX, hY)
        assert report.r == pytest.approx((hY - hX) / 2, abs=1e-9)
        extended = glue_cylinders(corpus.cylinder(hX), EnlargementSpec(report.expected))
        assert hY - area(extended) == pytest.approx(0.0, abs=1e-9)
        assert cylinder_modulus(extended) == pytest.approx(hY, abs=1e-9)


def test_extension_needs_smaller_domain():
    with pytest.raises(PreconditionError) as exc:
        modulus_of_extension_cylinder(2.0, 1.0)
    assert exc.value.hypothesis == "hX<=hY"


# ============= TEST 3: DOUBLE COVERS =============

def test_branched_cover_of_torus():
    s = corpus.two_rectangle_torus(mark_branch_points=True)
    cover, report = double_cover_branched(s, CoverSpec(("a", "b"), ((EdgeRef(0, 0),),)))
    assert report.degree == 2
    assert report.chi_cover == -2
    assert report.riemann_hurwitz
    assert report.branch_local_degrees == (2, 2)
    assert report.deck_involution_ok
    assert abs(report.gauss_bonnet_residual) < 1e-9
    assert area(cover) == pytest.approx(2.0)


def test_unbranched_cover_along_a_loop(square_torus):
    cover, report = double_cover_branched(square_torus, CoverSpec(cut_loops=((EdgeRef(0, 0),),)))
    assert report.chi_cover == 0
    assert report.riemann_hurwitz
    assert report.deck_fixed_points == ()
    assert validate_surface(cover).passed


@pytest.mark.parametrize("orientation", [HORIZONTAL_FOLIATION, VERTICAL_FOLIATION])
def test_cover_doubles_the_energy(square_torus, orientation):
    marked = corpus.two_rectangle_torus(mark_branch_points=True)
    cases = [
        (marked, CoverSpec(("a", "b"), ((EdgeRef(0, 0),),))),
        (square_torus, CoverSpec(cut_loops=((EdgeRef(0, 0),),))),
    ]
    for base, spec in cases:
        cover, _ = double_cover_branched(base, spec)
        before = dirichlet_energy(foliation_from_differential(base, orientation))
        after = dirichlet_energy(foliation_from_differential(cover, orientation))
        assert after == pytest.approx(2.0 * before, rel=1e-12)


def test_cover_needs_even_branch_set():
    s = corpus.two_rectangle_torus(mark_branch_points=True)
    with pytest.raises(PreconditionError) as exc:
        double_cover_branched(s, CoverSpec(("a",), ()))
    assert exc.value.hypothesis == "even branch set"


def test_cover_rejects_unknown_branch_point():
    s = corpus.two_rectangle_torus(mark_branch_points=True)
    with pytest.raises(PreconditionError) as exc:
        double_cover_branched(s, CoverSpec(("a", "z"), ((EdgeRef(0, 0),),)))
    assert exc.value.hypothesis == "marked puncture"


# ============= TEST 4: HORIZONTAL FLOW =============

def test_flow_clearance_of_slit_cylinder(slit_cylinder, cylinder_c1):
    clearance = flow_clearance(slit_cylinder, cylinder_c1)
    assert clearance.clearance == pytest.approx(0.4)
    assert "front tip" in clearance.tip


def test_flow_before_collision_is_conformal_embedding(slit_cylinder, cylinder_c1):
    m, report = horizontal_flow_family(slit_cylinder, cylinder_c1, 0.2, np.random.default_rng(7))
    assert report.passed
    assert report.conformal
    assert report.horizontal_complement
    assert report.sampled_lengths == pytest.approx([0.2] * len(report.sampled_lengths))
    assert m.faces == len(slit_cylinder.polygons)


def test_flow_at_collision_raises(slit_cylinder, cylinder_c1):
    with pytest.raises(CollisionError) as exc:
        horizontal_flow_family(slit_cylinder, cylinder_c1, 0.5)
    assert exc.value.clearance == pytest.approx(0.4)
