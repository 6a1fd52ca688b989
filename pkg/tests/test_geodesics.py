"""
Unit tests for geodesics, developing, angle conditions and divergence
Location: tests/test_geodesics.py
"""

import cmath
import math

import pytest

from geometry.errors import PreconditionError
from geometry.geodesics import (
    check_angle_condition,
    develop_path,
    geodesic_between,
    mesh_distance_oracle,
    planar_quad_divergence,
    polygon_gauss_bonnet,
    quad_divergence,
    trace_segment,
)
from geometry.surface_core import EdgeRef, SurfacePoint


def P(x, y, polygon=0):
    return SurfacePoint(polygon, complex(x, y))


# ============= TEST 1: SHORTEST PATHS =============

def test_straight_geodesic_inside_square(square_torus):
    path = geodesic_between(square_torus, P(0.1, 0.1), P(0.4, 0.5))
    assert path.length == pytest.approx(0.5, abs=1e-12)
    assert len(path.segments) == 1
    assert path.chain == ()
    assert check_angle_condition(square_torus, path).passed


def test_geodesic_wraps_across_gluing(square_torus):
    path = geodesic_between(square_torus, P(0.1, 0.5), P(0.9, 0.5))
    assert path.length == pytest.approx(0.2, abs=1e-12)
    assert len(path.chain) == 1


def test_geodesic_is_symmetric(octagon):
    p, q = P(0.1, 0.2), P(-0.7, 0.9)
    forward = geodesic_between(octagon, p, q)
    backward = geodesic_between(octagon, q, p)
    assert forward.length == pytest.approx(backward.length, abs=1e-9)


def test_same_point_has_zero_length(square_torus):
    assert geodesic_between(square_torus, P(0.3, 0.3), P(0.3, 0.3)).length == 0.0


# ============= TEST 2: TRACING AND DEVELOPING =============

def test_trace_segment_loops_around_torus(square_torus):
    trace = trace_segment(square_torus, P(0.5, 0.5), 1, 2.0)
    assert trace.chain == (EdgeRef(0, 1), EdgeRef(0, 1))
    assert trace.end.position == pytest.approx(0.5 + 0.5j)


def test_trace_segment_rejects_vertex_hit(square_torus):
    with pytest.raises(PreconditionError):
        trace_segment(square_torus, P(0.5, 0.5), 1 + 1j, 1.0)


def test_develop_path_places_neighbour(square_torus):
    developed = develop_path(square_torus, [EdgeRef(0, 1)])
    assert len(developed.copies) == 2
    assert developed.mismatch == pytest.approx(0.0, abs=1e-12)
    assert developed.copies[1].vertices[0] == pytest.approx(1 + 0j)


def test_develop_path_needs_edges(square_torus):
    with pytest.raises(PreconditionError):
        develop_path(square_torus, [])


# ============= TEST 3: GEODESIC POLYGONS =============

def test_flat_triangle_balances(square_torus):
    corners = [P(0.2, 0.2), P(0.8, 0.2), P(0.5, 0.8)]
    sides = [geodesic_between(square_torus, a, b) for a, b in zip(corners, corners[1:] + corners[:1])]
    result = polygon_gauss_bonnet(square_torus, sides)
    assert result.passed
    assert sum(result.corner_angles) == pytest.approx(math.pi, abs=1e-9)
    assert result.enclosed_cycles == ()


# ============= TEST 4: DIVERGENCE OF QUADRILATERALS =============

def test_planar_rectangle_is_equality_case():
    report = planar_quad_divergence(0, 1, 1j, 1 + 1j)
    assert report.verdict
    assert report.equality
    assert report.parallelogram


def test_planar_diverging_legs():
    report = planar_quad_divergence(0, 1, -0.1 + 1j, 1.1 + 1j)
    assert report.verdict
    assert report.d_y == pytest.approx(1.2)
    assert not report.equality
    assert report.parallelogram is None


def test_planar_converging_legs_violate_angle_sum():
    with pytest.raises(PreconditionError) as exc:
        planar_quad_divergence(0, 1, 0.1 + 1j, 0.9 + 1j)
    assert exc.value.hypothesis == "angle_sum"


def test_surface_rectangle_develops_to_parallelogram(square_torus):
    report = quad_divergence(square_torus, P(0.2, 0.2), P(0.6, 0.2), P(0.2, 0.6), P(0.6, 0.6))
    assert report.verdict
    assert report.equality
    assert report.parallelogram


def test_divergence_needs_equal_legs(square_torus):
    with pytest.raises(PreconditionError) as exc:
        quad_divergence(square_torus, P(0.2, 0.2), P(0.6, 0.2), P(0.2, 0.6), P(0.6, 0.7))
    assert exc.value.hypothesis == "equal_lengths"


# ============= TEST 5: MESH ORACLE =============

def test_mesh_oracle_bounds_geodesic_from_above(square_torus):
    pairs = [(P(0.1, 0.1), P(0.4, 0.5)), (P(0.1, 0.5), P(0.9, 0.5))]
    oracle = mesh_distance_oracle(square_torus, pairs, resolution=20)
    assert oracle[0] == pytest.approx(0.5, abs=1e-12)
    assert 0.2 - 1e-12 <= oracle[1] <= 0.22


@pytest.mark.slow
def test_geodesics_agree_with_mesh_oracle(octagon, rng):
    pairs = []
    poly = octagon.polygons[0]
    while len(pairs) < 100:
        z = complex(*rng.uniform(-1.2, 1.2, 2))
        w = complex(*rng.uniform(-1.2, 1.2, 2))
        if poly.contains(z) and poly.contains(w):
            pairs.append((SurfacePoint(0, z), SurfacePoint(0, w)))
    oracle = mesh_distance_oracle(octagon, pairs)
    for (p, q), bound in zip(pairs, oracle):
        length = geodesic_between(octagon, p, q).length
        assert length <= bound + 1e-9
        assert length >= bound * (1 - 1e-3) - 1e-9


# ============= TEST 6: RANDOMIZED SWEEPS =============

def _random_quadrilateral(rng, center, scale):
    """x0, x1, y0, y1 with equal legs on one side of [x0, x1] and angle sum at least pi."""
    x0 = center + 0.4 * scale * complex(*rng.uniform(-1.0, 1.0, 2)) / math.sqrt(2)
    turn = cmath.exp(1j * rng.uniform(0.0, 2 * math.pi))
    d, leg = rng.uniform(0.2, 1.0, 2) * scale
    alpha = rng.uniform(0.0, math.pi)
    beta = math.pi - alpha + rng.uniform(0.0, 1.0) * alpha
    x1 = x0 + d * turn
    y0 = x0 + leg * turn * cmath.exp(1j * alpha)
    y1 = x1 + leg * turn * cmath.exp(1j * (math.pi - beta))
    return x0, x1, y0, y1


def _torus_distance(z, w):
    return min(abs(z - w + complex(m, n)) for m in (-1, 0, 1) for n in (-1, 0, 1))


def test_random_planar_quadrilaterals_diverge(rng):
    for _ in range(1000):
        x0, x1, y0, y1 = _random_quadrilateral(rng, 0j, 1.0)
        report = planar_quad_divergence(x0, x1, y0, y1)
        assert report.verdict
        assert report.d_y >= report.d_x - 1e-8


def _surface_quadrilaterals_diverge(square_torus, rng, count):
    for _ in range(count):
        x0, x1, y0, y1 = _random_quadrilateral(rng, 0.5 + 0.5j, 0.1)
        report = quad_divergence(
            square_torus, P(x0.real, x0.imag), P(x1.real, x1.imag), P(y0.real, y0.imag), P(y1.real, y1.imag)
        )
        assert report.verdict
        assert report.d_y >= report.d_x - 1e-8
        assert report.d_x == pytest.approx(abs(x1 - x0), abs=1e-9)


def test_random_surface_quadrilaterals_diverge(square_torus, rng):
    _surface_quadrilaterals_diverge(square_torus, rng, 25)


@pytest.mark.slow
def test_thousand_surface_quadrilaterals_diverge(square_torus, rng):
    _surface_quadrilaterals_diverge(square_torus, rng, 1000)


def test_torus_distances_obey_triangle_inequality(square_torus, rng):
    """
    Validates:
    - geodesic lengths on the square torus match the flat lattice distance
    - d(p, r) <= d(p, q) + d(q, r) on random triples
    """
    for _ in range(30):
        p, q, r = (complex(*rng.uniform(0.05, 0.95, 2)) for _ in range(3))
        pq = geodesic_between(square_torus, P(p.real, p.imag), P(q.real, q.imag)).length
        qr = geodesic_between(square_torus, P(q.real, q.imag), P(r.real, r.imag)).length
        pr = geodesic_between(square_torus, P(p.real, p.imag), P(r.real, r.imag)).length
        assert pq == pytest.approx(_torus_distance(p, q), abs=1e-9)
        assert pr <= pq + qr + 1e-9


@pytest.mark.slow
def test_octagon_distances_obey_triangle_inequality(octagon, rng):
    poly = octagon.polygons[0]
    points = []
    while len(points) < 150:
        z = complex(*rng.uniform(-1.2, 1.2, 2))
        if poly.contains(z):
            points.append(SurfacePoint(0, z))
    for p, q, r in zip(points[0::3], points[1::3], points[2::3]):
        pq = geodesic_between(octagon, p, q).length
        qr = geodesic_between(octagon, q, r).length
        pr = geodesic_between(octagon, p, r).length
        assert pr <= pq + qr + 1e-9
