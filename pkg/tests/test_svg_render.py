"""
Unit tests for SVG scenes
Location: tests/test_svg_render.py
"""

import pytest

from geometry import corpus
from geometry.errors import PreconditionError
from geometry.geodesics import geodesic_between
from geometry.semismooth import l_shape, semi_smooth_check
from geometry.surface_core import SurfacePoint
from utils.svg_render import Scene, cones_scene, geodesic_scene, planar_set_scene, render_svg


def test_scene_serializes_deterministically():
    scene = Scene("triangle").polygon([0, 1, 1j]).line(0, 1 + 1j, dash="4,2").dot(0.5 + 0.5j).text(0.2j, "a")
    first, second = scene.as_svg(), scene.as_svg()
    assert first == second
    assert first.count("<circle") == 1
    assert "triangle" in first


def test_empty_scene_is_rejected():
    with pytest.raises(PreconditionError) as exc:
        Scene().as_svg()
    assert exc.value.hypothesis == "non-empty scene"


def test_surface_scenes_render(square_torus, tmp_path):
    path = geodesic_between(square_torus, SurfacePoint(0, 0.1 + 0.1j), SurfacePoint(0, 0.4 + 0.5j))
    target = render_svg(geodesic_scene(square_torus, path), tmp_path / "geodesic.svg")
    assert "<svg" in target.read_text(encoding="utf-8")
    assert cones_scene(corpus.build("octagon")).items


def test_named_scene_dispatch(tmp_path):
    B = l_shape()
    target = render_svg("semismooth", tmp_path / "l.svg", B, semi_smooth_check(B))
    assert target.exists()
    assert len(planar_set_scene(B, semi_smooth_check(B)).items) > 1
    with pytest.raises(PreconditionError):
        render_svg("teapot", tmp_path / "t.svg")
