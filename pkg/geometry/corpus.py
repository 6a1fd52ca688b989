"""
Named corpus surfaces
Location: geometry/corpus.py

Builders for the reference surfaces used by tests, the CLI and the sample
outputs. The same surfaces ship as .hts files under data/, indexed by
data/corpus.csv.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable, Dict

import pandas as pd

from config import CORPUS_FILE
from geometry.surface_core import (
    HORIZONTAL,
    PUNCTURE,
    BoundaryEdge,
    EdgeRef,
    HalfTranslationSurface,
    MarkedPoint,
    Pairing,
    Polygon,
    SurfacePoint,
)

HALF_DIAGONAL = 0.5 + 1 / math.sqrt(2)  # apothem of the unit-side regular octagon


def _pair(a, b, sign=1) -> Pairing:
    return Pairing(EdgeRef(*a), EdgeRef(*b), sign)


def _bdry(p, e) -> BoundaryEdge:
    return BoundaryEdge(EdgeRef(p, e), HORIZONTAL)


# ============= TORI =============

def square_torus() -> HalfTranslationSurface:
    square = Polygon((0, 1, 1 + 1j, 1j), "P0")
    return HalfTranslationSurface((square,), (_pair((0, 0), (0, 2)), _pair((0, 1), (0, 3))))


def two_rectangle_torus(mark_branch_points: bool = False) -> HalfTranslationSurface:
    """Unit torus as two half-width rectangles; L.0 joins (0,0) to (0.5,0)."""
    left = Polygon((0, 0.5, 0.5 + 1j, 1j), "L")
    right = Polygon((0.5, 1, 1 + 1j, 0.5 + 1j), "R")
    pairings = (
        _pair((0, 1), (1, 3)),
        _pair((1, 1), (0, 3)),
        _pair((0, 0), (0, 2)),
        _pair((1, 0), (1, 2)),
    )
    marks = ()
    if mark_branch_points:
        marks = (
            MarkedPoint(SurfacePoint(0, 0j), PUNCTURE, "a"),
            MarkedPoint(SurfacePoint(0, 0.5 + 0j), PUNCTURE, "b"),
        )
    return HalfTranslationSurface((left, right), pairings, (), marks)


def tilted_torus() -> HalfTranslationSurface:
    """Q(2,-1,-1) torus: a 3x1 rectangle with half-translation folds, turned by -pi/4.

    Vertex (2,0) belongs to the 4pi cone point; (1,0) and (2,1) are poles.
    """
    turn = cmath.exp(-1j * math.pi / 4)
    base = (0, 1, 2, 3, 3 + 1j, 2 + 1j, 1 + 1j, 1j)
    rectangle = Polygon(tuple(turn * v for v in base), "T")
    pairings = (
        _pair((0, 0), (0, 1), -1),
        _pair((0, 5), (0, 4), -1),
        _pair((0, 2), (0, 6), 1),
        _pair((0, 3), (0, 7), 1),
    )
    return HalfTranslationSurface((rectangle,), pairings)


# ============= HIGHER GENUS AND SPHERES =============

def octagon_surface() -> HalfTranslationSurface:
    """Regular octagon with side 1, opposite sides glued by translation (genus 2)."""
    h = HALF_DIAGONAL
    octagon = Polygon(
        (
            complex(-0.5, -h), complex(0.5, -h), complex(h, -0.5), complex(h, 0.5),
            complex(0.5, h), complex(-0.5, h), complex(-h, 0.5), complex(-h, -0.5),
        ),
        "O",
    )
    return HalfTranslationSurface((octagon,), tuple(_pair((0, i), (0, i + 4)) for i in range(4)))


def pillowcase() -> HalfTranslationSurface:
    """Sphere with four pi cone points."""
    hexagon = Polygon((0, 0.5, 1, 1 + 1j, 0.5 + 1j, 1j), "P")
    pairings = (_pair((0, 0), (0, 1), -1), _pair((0, 3), (0, 4), -1), _pair((0, 5), (0, 2), 1))
    return HalfTranslationSurface((hexagon,), pairings)


def half_octagon_sphere() -> HalfTranslationSurface:
    """Octagon surface modulo its central half-turn: one 3pi point and five pi points."""
    h = HALF_DIAGONAL
    m = (h + 0.5) / 2
    polygon = Polygon(
        (
            0j, complex(h, 0), complex(h, 0.5), complex(m, m), complex(0.5, h),
            complex(0, h), complex(-0.5, h), complex(-m, m), complex(-h, 0.5), complex(-h, 0),
        ),
        "H",
    )
    pairings = (
        _pair((0, 9), (0, 0), -1),
        _pair((0, 1), (0, 8), 1),
        _pair((0, 2), (0, 3), -1),
        _pair((0, 4), (0, 5), -1),
        _pair((0, 6), (0, 7), -1),
    )
    return HalfTranslationSurface((polygon,), pairings)


# ============= SURFACES WITH BOUNDARY =============

def cylinder(height: float, circumference: float = 1.0) -> HalfTranslationSurface:
    """Flat cylinder C(h): vertical sides glued, horizontal boundary circles."""
    w, h = circumference, height
    rectangle = Polygon((0, complex(w, 0), complex(w, h), complex(0, h)), "C")
    return HalfTranslationSurface((rectangle,), (_pair((0, 1), (0, 3)),), (_bdry(0, 0), _bdry(0, 2)))


def slit_cylinder(height: float = 1.0, slit_height: float = 0.5, slit_length: float = 0.6) -> HalfTranslationSurface:
    """C(height) minus the horizontal slit from (0, slit_height) of the given length."""
    y, s, h = slit_height, slit_length, height
    lower = Polygon((0, 1, complex(1, y), complex(s, y), complex(0, y)), "lower")
    upper = Polygon((complex(0, y), complex(s, y), complex(1, y), complex(1, h), complex(0, h)), "upper")
    pairings = (_pair((0, 1), (0, 4)), _pair((1, 2), (1, 4)), _pair((0, 2), (1, 1)))
    boundary = (_bdry(0, 0), _bdry(0, 3), _bdry(1, 0), _bdry(1, 3))
    return HalfTranslationSurface((lower, upper), pairings, boundary)


# ============= REGISTRY =============

CORPUS: Dict[str, Callable[[], HalfTranslationSurface]] = {
    "square_torus": square_torus,
    "two_rectangle_torus": two_rectangle_torus,
    "octagon": octagon_surface,
    "pillowcase": pillowcase,
    "half_octagon": half_octagon_sphere,
    "tilted_torus": tilted_torus,
    "cylinder_c1": lambda: cylinder(1.0),
    "cylinder_c2": lambda: cylinder(2.0),
    "slit_cylinder": slit_cylinder,
}


def build(name: str) -> HalfTranslationSurface:
    try:
        return CORPUS[name]()
    except KeyError:
        raise KeyError(f"unknown corpus surface {name!r}; known: {', '.join(sorted(CORPUS))}") from None


def load_corpus_table() -> pd.DataFrame:
    """data/corpus.csv: name, file, expected_area, expected_chi, description."""
    return pd.read_csv(CORPUS_FILE)
