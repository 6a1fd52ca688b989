"""
SVG figures
Location: utils/svg_render.py

Scenes are collected in flat coordinates and written with drawsvg. Every
coordinate is rounded to CLI_CONFIG["svg_precision"] decimals and elements are
appended in a fixed order, so a scene always serializes to the same bytes.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import drawsvg as draw
import numpy as np

from config import CLI_CONFIG
from geometry.errors import PreconditionError
from utils.logger import get_logger

logger = get_logger("svg_render")

PAD = 20.0
EDGE_COLOR = "#333333"
FACE_COLOR = "#e8eef7"
HIGHLIGHT = "#d62728"
INNER_COLOR = "#8fbc8f"
OUTER_COLOR = "#f3e6b3"


@dataclass
class _Item:
    kind: str  # polygon | line | dot | text
    points: Tuple[complex, ...]
    style: Dict = field(default_factory=dict)
    text: str = ""


class Scene:
    """Ordered list of drawing items in flat (y-up) coordinates."""

    def __init__(self, title: str = ""):
        self.title = title
        self.items: List[_Item] = []

    def polygon(self, points: Sequence[complex], **style) -> "Scene":
        self.items.append(_Item("polygon", tuple(complex(z) for z in points), style))
        return self

    def line(self, a: complex, b: complex, **style) -> "Scene":
        self.items.append(_Item("line", (complex(a), complex(b)), style))
        return self

    def polyline(self, points: Sequence[complex], **style) -> "Scene":
        self.items.append(_Item("polyline", tuple(complex(z) for z in points), style))
        return self

    def dot(self, z: complex, radius: float = 3.0, **style) -> "Scene":
        self.items.append(_Item("dot", (complex(z),), dict(style, radius=radius)))
        return self

    def text(self, z: complex, label: str, **style) -> "Scene":
        self.items.append(_Item("text", (complex(z),), style, label))
        return self

    def bounds(self) -> Tuple[float, float, float, float]:
        pts = [z for item in self.items for z in item.points]
        if not pts:
            raise PreconditionError("an empty scene cannot be rendered", hypothesis="non-empty scene")
        xs, ys = [z.real for z in pts], [z.imag for z in pts]
        return min(xs), min(ys), max(xs), max(ys)

    # ============= OUTPUT =============

    def to_drawing(self, scale: Optional[float] = None) -> draw.Drawing:
        scale = scale or CLI_CONFIG["svg_scale"]
        digits = CLI_CONFIG["svg_precision"]
        minx, miny, maxx, maxy = self.bounds()
        width = round((maxx - minx) * scale + 2 * PAD, digits)
        height = round((maxy - miny) * scale + 2 * PAD, digits)

        def X(z: complex) -> float:
            return round((z.real - minx) * scale + PAD, digits)

        def Y(z: complex) -> float:
            return round((maxy - z.imag) * scale + PAD, digits)

        d = draw.Drawing(width, height)
        d.append(draw.Rectangle(0, 0, width, height, fill="white"))
        for item in self.items:
            style = dict(item.style)
            if item.kind == "polygon":
                coords = [c for z in item.points for c in (X(z), Y(z))]
                d.append(draw.Lines(*coords, close=True,
                                    fill=style.get("fill", FACE_COLOR),
                                    fill_opacity=style.get("opacity", 1.0),
                                    stroke=style.get("stroke", EDGE_COLOR),
                                    stroke_width=style.get("width", 1.0)))
            elif item.kind in ("line", "polyline"):
                coords = [c for z in item.points for c in (X(z), Y(z))]
                extra = {"stroke_dasharray": style["dash"]} if "dash" in style else {}
                d.append(draw.Lines(*coords, close=False, fill="none",
                                    stroke=style.get("stroke", EDGE_COLOR),
                                    stroke_width=style.get("width", 1.0), **extra))
            elif item.kind == "dot":
                z = item.points[0]
                d.append(draw.Circle(X(z), Y(z), style["radius"], fill=style.get("fill", HIGHLIGHT)))
            else:
                z = item.points[0]
                d.append(draw.Text(item.text, style.get("size", 10), X(z), Y(z),
                                   fill=style.get("fill", "black"), text_anchor="middle"))
        if self.title:
            d.append(draw.Text(self.title, 12, round(width / 2, digits), 14, text_anchor="middle"))
        return d

    def as_svg(self) -> str:
        return self.to_drawing().as_svg()


# ============= SURFACES =============

def _row_offsets(polygons: Sequence[Sequence[complex]], gap: float = 0.25) -> List[complex]:
    """Shift polygons so they sit left to right without overlapping."""
    offsets, cursor = [], 0.0
    for verts in polygons:
        xs = [z.real for z in verts]
        offsets.append(complex(cursor - min(xs), 0.0))
        cursor += max(xs) - min(xs) + gap
    return offsets


def surface_scene(s, title: str = "surface") -> Scene:
    scene = Scene(title)
    offsets = _row_offsets([p.vertices for p in s.polygons])
    for pid, (poly, shift) in enumerate(zip(s.polygons, offsets)):
        scene.polygon([v + shift for v in poly.vertices])
        for i in range(poly.n):
            a, b = poly.edge_endpoints(i)
            if s.is_boundary(_edge(pid, i)):
                scene.line(a + shift, b + shift, stroke="black", width=3.0)
        centroid = sum(poly.vertices) / poly.n + shift
        scene.text(centroid, poly.name or str(pid))
    for mark in s.marked_points:
        scene.dot(mark.point.position + offsets[mark.point.polygon_id], radius=2.5, fill="black")
    return scene


def _edge(pid: int, i: int):
    from geometry.surface_core import EdgeRef

    return EdgeRef(pid, i)


def cones_scene(s, title: str = "cone points") -> Scene:
    """Surface with every singular corner marked and labelled by its angle in units of pi."""
    from geometry.surface_core import cone_points

    scene = surface_scene(s, title)
    offsets = _row_offsets([p.vertices for p in s.polygons])
    for cone in cone_points(s):
        if not cone.singular:
            continue
        label = f"{cone.prongs}π" if cone.prongs is not None else f"{cone.total_angle / math.pi:.3f}π"
        for pid, k in cone.vertex_cycle:
            z = s.polygons[pid].vertex(k) + offsets[pid]
            scene.dot(z, radius=4.0)
            scene.text(z + 0.06j, label, size=9, fill=HIGHLIGHT)
    return scene


def geodesic_scene(s, path, title: str = "geodesic") -> Scene:
    """Each straight piece is drawn over its developed polygon chain."""
    from geometry.geodesics import develop_path

    scene = Scene(title)
    cursor = 0.0
    for seg in path.segments:
        if seg.chain:
            copies = [c.vertices for c in develop_path(s, seg.chain).copies]
        else:
            copies = [s.polygons[seg.start.polygon_id].vertices]
        minx = min(z.real for verts in copies for z in verts)
        maxx = max(z.real for verts in copies for z in verts)
        shift = complex(cursor - minx, 0.0)
        for verts in copies:
            scene.polygon([v + shift for v in verts])
        a = seg.start.position + shift
        scene.line(a, a + seg.start_direction * seg.length, stroke=HIGHLIGHT, width=2.0)
        scene.dot(a, radius=3.0)
        cursor += maxx - minx + 0.25
    return scene


# ============= FLOW AND BLOB =============

def _wrapped(x0: float, x1: float, width: float) -> List[Tuple[float, float]]:
    x0, x1 = x0 % width, x0 % width + (x1 - x0)
    if x1 <= width:
        return [(x0, x1)]
    return [(x0, width), (0.0, x1 - width)]


def flow_scene(clearance, width: float, height: float, t: float, title: str = "") -> Scene:
    """Cylinder of circumference `width`; original slits in black, the complement of the flowed image in red."""
    scene = Scene(title or f"horizontal flow t={t:g}")
    scene.polygon([0, width, complex(width, height), complex(0, height)])
    for sl in clearance.slits:
        y = sl.height
        scene.line(complex(sl.x0, y), complex(sl.x1, y), stroke="black", width=2.0, dash="4,3")
        for a, b in _wrapped(sl.x0 + t, sl.x1 + t, width):
            scene.line(complex(a, y), complex(b, y), stroke=HIGHLIGHT, width=3.0)
    return scene


def _hatch(scene: Scene, lo: float, hi: float, width: float, step: float = 0.05):
    x = -(hi - lo)
    while x < width:
        a, b = complex(x, lo), complex(x + hi - lo, hi)
        if a.real < 0:
            a, b = complex(0, lo - x), b
        if b.real > width:
            b = complex(width, lo + width - x)
        scene.line(a, b, stroke="#555555", width=0.7)
        x += step


def blob_scene(estimate, circumference: float = 1.0, title: str = "") -> Scene:
    """Outer band shaded, inner band filled, sampled excluded heights hatched."""
    scene = Scene(title or f"blob of C({estimate.hX:g}) in C({estimate.hY:g})")
    w = circumference
    scene.polygon([0, w, complex(w, estimate.hY), complex(0, estimate.hY)], fill="white")
    bands = estimate.region_polygons(w)
    scene.polygon([complex(*p) for p in bands["outer"]], fill=OUTER_COLOR, stroke="none")
    scene.polygon([complex(*p) for p in bands["inner"]], fill=INNER_COLOR, stroke="none")
    heights = [v.candidate_height for v in estimate.sampled]
    for k, verdict in enumerate(estimate.sampled):
        if verdict.verdict != "excluded":
            continue
        lo = 0.5 * (heights[k - 1] + heights[k]) if k > 0 else 0.0
        hi = 0.5 * (heights[k] + heights[k + 1]) if k + 1 < len(heights) else estimate.hY
        _hatch(scene, lo, hi, w)
    scene.dot(complex(0.5 * w, estimate.x_height), radius=3.0, fill="black")
    return scene


# ============= PLANAR SETS AND CURVES =============

def planar_set_scene(B, report=None, title: str = "planar set") -> Scene:
    scene = Scene(title)
    scene.polygon(B.outer)
    for hole in B.holes:
        scene.polygon(hole, fill="white")
    if report is not None:
        reach = 0.08 * B.diameter()
        for cone in report.cones:
            if cone.empty:
                continue
            for theta in (cone.theta1, cone.theta2):
                scene.line(cone.base, cone.base + reach * complex(math.cos(theta), math.sin(theta)),
                           stroke="#1f77b4", width=0.8)
        for w in report.witnesses:
            scene.dot(complex(*w["point"]), radius=4.0)
    return scene


def curves_scene(curves, limit, fingers=None, title: str = "curve family") -> Scene:
    scene = Scene(title)
    for curve in curves:
        pts = list(curve.points)
        scene.polyline(pts + pts[:1], stroke="#999999", width=0.6)
    lpts = list(limit.points)
    scene.polyline(lpts + lpts[:1], stroke="black", width=1.5)
    if fingers is not None:
        for witness in fingers.witnesses:
            if witness is None:
                continue
            curve = curves[witness.curve_index]
            for z in curve.evaluate(np.array([witness.x, witness.y, witness.z, witness.w])):
                scene.dot(complex(z), radius=2.5)
    return scene


# ============= DISPATCH =============

SCENES = {
    "surface": surface_scene,
    "cones": cones_scene,
    "geodesic": geodesic_scene,
    "flow": flow_scene,
    "blob": blob_scene,
    "semismooth": planar_set_scene,
    "curves": curves_scene,
}


def render_svg(scene: Union[str, Scene], path: Union[str, Path], *args, **kwargs) -> Path:
    """Write a scene, or build the named scene from `args` first, to `path`."""
    if isinstance(scene, str):
        if scene not in SCENES:
            raise PreconditionError(f"unknown scene '{scene}'", hypothesis="known scene")
        scene = SCENES[scene](*args, **kwargs)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(scene.as_svg(), encoding="utf-8")
    logger.info("figure written to %s (%d items)", path, len(scene.items))
    return path
