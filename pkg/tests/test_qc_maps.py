"""
Unit tests for piecewise-affine maps, dilatation and Teichmuller embeddings
Location: tests/test_qc_maps.py
"""

import numpy as np
import pytest

from geometry import corpus
from geometry.errors import PreconditionError
from geometry.foliation_el import (
    HORIZONTAL_FOLIATION,
    VERTICAL_FOLIATION,
    el_monotonicity_check,
    foliation_from_differential,
    refine_foliation,
)
from geometry.qc_maps import (
    beltrami_of,
    compose_maps,
    dilatation_of,
    identity_map,
    inclusion_map,
    linear_map,
    matrix_dilatation,
    push_point,
    push_rings,
    shear_dilatation,
    shear_gadget,
    stretch_map,
    teichmuller_embedding_check,
    triangle_punch_map,
    vertex_perturbation_map,
)
from geometry.surface_core import area, refine_triangles, triangulate, validate_surface


# ============= TEST 1: STRETCHES =============

@pytest.mark.parametrize("K", [1.0, 1.5, 3.0])
def test_stretch_beltrami_coefficient(square_torus, K):
    stretched, m = stretch_map(square_torus, K)
    assert dilatation_of(m) == pytest.approx(K)
    assert beltrami_of(m).max_modulus == pytest.approx((K - 1) / (K + 1))
    assert area(stretched) == pytest.approx(K)
    assert validate_surface(stretched).passed


def test_stretch_refuses_compression(square_torus):
    with pytest.raises(PreconditionError) as exc:
        stretch_map(square_torus, 0.5)
    assert exc.value.hypothesis == "K>=1"
    stretched, _ = stretch_map(square_torus, 0.5, allow_compression=True)
    assert area(stretched) == pytest.approx(0.5)


def test_stretches_compose(square_torus):
    mid, inner = stretch_map(square_torus, 2.0)
    _, outer = stretch_map(mid, 3.0)
    both = compose_maps(outer, inner)
    assert np.allclose(both.matrices[0], np.diag([6.0, 1.0]))
    assert dilatation_of(both) == pytest.approx(6.0)


def test_stretch_is_a_teichmuller_embedding(square_torus):
    _, m = stretch_map(square_torus, 2.0)
    report = teichmuller_embedding_check(m, 2.0)
    assert report.passed
    assert report.complement_area == pytest.approx(0.0, abs=1e-9)
    assert report.complement_segments == ()


def test_cylinder_inclusion_leaves_an_open_complement(cylinder_c1):
    m = inclusion_map(cylinder_c1, corpus.build("cylinder_c2"))
    report = teichmuller_embedding_check(m, 1.0)
    assert report.matrices_ok
    assert not report.passed
    assert report.complement_area == pytest.approx(1.0, abs=1e-9)
    assert report.horizontal


# ============= TEST 2: SHEARS AND THE PUNCH GADGET =============

def test_shear_dilatation_closed_form():
    assert shear_dilatation(0.1) == pytest.approx(1.1051249, abs=1e-7)
    assert shear_dilatation(0.0) == 1.0
    assert matrix_dilatation(np.array([[1.0, 0.7], [0.0, 1.0]])) == pytest.approx(shear_dilatation(0.7))


def test_sheared_torus(square_torus):
    m = linear_map(square_torus, [[1.0, 0.5], [0.0, 1.0]])
    K = dilatation_of(m)
    mu = beltrami_of(m).max_modulus
    assert K == pytest.approx(shear_dilatation(0.5))
    assert K == pytest.approx((1 + mu) / (1 - mu))
    assert not teichmuller_embedding_check(m, K).matrices_ok


def test_shear_gadget_tends_to_conformal():
    values = [shear_gadget(3.0, delta)[1] for delta in (0.5, 0.1, 0.01, 0.001)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(1.0, abs=0.01)


def test_punch_after_stretch_is_the_shear_gadget():
    """
    Validates:
    - the punch map fixes the triangle's corners
    - stretching its lower face gives the gadget shear, the upper face the opposite shear
    """
    K, delta = 2.5, 0.2
    m = triangle_punch_map(K, delta)
    gadget, dilatation = shear_gadget(K, delta)
    stretch = np.diag([K, 1.0])
    assert np.allclose(stretch @ m.matrices[0], gadget)
    assert matrix_dilatation(stretch @ m.matrices[1]) == pytest.approx(dilatation)
    assert m.apply(0, -1j) == pytest.approx(-1j)
    assert m.apply(1, 1j) == pytest.approx(1j)
    assert m.apply(0, 0j) == pytest.approx((1 - 1 / K) * delta)


def test_punch_needs_positive_delta():
    with pytest.raises(PreconditionError):
        triangle_punch_map(2.0, 0.0)


# ============= TEST 3: POINT PUSHES AND PERTURBATIONS =============

def test_push_point_fixes_the_rim():
    report = push_point(1.0, 0.1 + 0.05j)
    assert report.center_image == 0.1 + 0.05j
    assert report.dilatation > 1.0
    rim = [z for poly in report.map.domain.polygons for z in poly.vertices if abs(abs(z) - 1.0) < 1e-12]
    for face, poly in enumerate(report.map.domain.polygons):
        for z in poly.vertices:
            if z in rim:
                assert report.map.apply(face, z) == pytest.approx(z)


def test_smaller_push_is_closer_to_conformal():
    assert push_point(1.0, 0.01).dilatation < push_point(1.0, 0.1).dilatation


@pytest.mark.parametrize("displacement", [0.6, 0.75, 0.9, 0.99j, -0.995])
def test_push_near_the_rim(displacement):
    """
    Validates:
    - any displacement inside the disk gives an orientation-preserving map
    - the rim stays fixed and the center lands on the displacement
    """
    report = push_point(1.0, displacement)
    assert report.center_image == complex(displacement)
    assert report.inner_radius < 1.0 - abs(displacement)
    assert all(np.linalg.det(M) > 0 for M in report.map.matrices)
    for face, poly in enumerate(report.map.domain.polygons):
        for z in poly.vertices:
            if abs(abs(z) - 1.0) < 1e-12:
                assert report.map.apply(face, z) == pytest.approx(z)


def test_push_rings_refine_near_the_rim():
    assert push_rings(1.0, 0.1, 24, 0.25) == (24, 0.25)
    n, inner = push_rings(1.0, 0.995, 24, 0.25)
    assert n > 24
    assert 0 < inner < 0.005


def test_push_dilatation_grows_with_displacement():
    assert push_point(1.0, 0.25).dilatation < push_point(1.0, 0.5).dilatation


def test_push_cannot_leave_the_disk():
    with pytest.raises(PreconditionError) as exc:
        push_point(1.0, 1.2)
    assert exc.value.hypothesis == "|displacement| < radius"


def test_vertex_perturbation_keeps_area(square_torus, rng):
    fine = refine_triangles(triangulate(square_torus).surface, 2)
    m = vertex_perturbation_map(fine, 0.02, rng)
    assert dilatation_of(m) >= 1.0
    assert area(m.codomain) == pytest.approx(1.0, abs=1e-9)


def test_vertex_perturbation_needs_triangles(square_torus, rng):
    with pytest.raises(PreconditionError) as exc:
        vertex_perturbation_map(square_torus, 0.02, rng)
    assert exc.value.hypothesis == "triangles"


def test_identity_map_is_conformal(octagon):
    m = identity_map(octagon)
    assert dilatation_of(m) == pytest.approx(1.0)
    assert beltrami_of(m).max_modulus == pytest.approx(0.0, abs=1e-12)
    assert teichmuller_embedding_check(m, 1.0).passed


# ============= TEST 4: RANDOM FACE-WISE MAPS =============

def _rotation(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def _random_matrix(rng, stretch):
    a, b = rng.uniform(0.0, 2 * np.pi, 2)
    return _rotation(a) @ np.diag([stretch, 1.0]) @ _rotation(b)


def _random_qc_map(fine, rng):
    """Vertex perturbation followed by a linear map; dilatation stays below 3."""
    inner = vertex_perturbation_map(fine, rng.uniform(0.0, 0.02), rng)
    outer = linear_map(inner.codomain, _random_matrix(rng, rng.uniform(1.0, 2.0)))
    return compose_maps(outer, inner)


def _monotonicity_sweep(square_torus, rng, count):
    fine = refine_triangles(triangulate(square_torus).surface, 2)
    foliations = [
        refine_foliation(foliation_from_differential(square_torus, orientation), 2)
        for orientation in (HORIZONTAL_FOLIATION, VERTICAL_FOLIATION)
    ]
    for _ in range(count):
        m = _random_qc_map(fine, rng)
        K_map = dilatation_of(m)
        assert 1.0 <= K_map <= 3.0
        K = rng.uniform(K_map, 3.0)
        for f in foliations:
            report = el_monotonicity_check(f, m, K)
            assert report.passed
            assert report.energy_after <= K_map * report.energy_before + 1e-8


def test_random_maps_respect_energy_bound(square_torus, rng):
    _monotonicity_sweep(square_torus, rng, 40)


@pytest.mark.slow
def test_five_hundred_random_maps_respect_energy_bound(square_torus, rng):
    _monotonicity_sweep(square_torus, rng, 500)


def test_composition_dilatation_is_submultiplicative(square_torus, rng):
    fine = refine_triangles(triangulate(square_torus).surface, 2)
    for _ in range(50):
        inner = _random_qc_map(fine, rng)
        outer = linear_map(inner.codomain, _random_matrix(rng, rng.uniform(1.0, 3.0)))
        both = compose_maps(outer, inner)
        assert dilatation_of(both) <= dilatation_of(outer) * dilatation_of(inner) + 1e-9
        wobble = vertex_perturbation_map(inner.codomain, 0.01, rng)
        assert dilatation_of(compose_maps(wobble, inner)) <= dilatation_of(wobble) * dilatation_of(inner) + 1e-9
