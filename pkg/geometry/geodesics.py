"""
Flat geodesics on half-translation surfaces
Location: geometry/geodesics.py

Shortest paths are found by sweeping wedge-shaped windows from a source
across the triangulated surface (each window is the set of straight rays from
the unfolded source through an interval of an edge). Vertices act as
secondary sources; a Dijkstra pass over {source, vertices, target} stitches
straight segments together. The number of crossings of original polygon edges
is bounded by the budget.
"""

from __future__ import annotations

import cmath
import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from shapely.geometry import LineString, Point
from shapely.ops import polygonize, unary_union

from config import GEODESIC_CONFIG, TOLERANCE_CONFIG
from geometry.errors import BudgetExhaustedError, PreconditionError, StructuralError
from geometry.surface_core import (
    IDENTITY,
    INTERIOR,
    Corner,
    EdgeRef,
    HalfTranslationSurface,
    Isometry,
    SurfacePoint,
    Triangulation,
    canonicalize_point,
    ccw_angle,
    cross,
    diameter_bound,
    dot,
    point_segment_distance,
    triangulate,
)
from utils.logger import get_logger

logger = get_logger(__name__)

TOL = TOLERANCE_CONFIG["exact"]
TWO_PI = 2 * math.pi


# ============= RESULT TYPES =============

@dataclass(frozen=True)
class GeodesicSegment:
    """Straight segment; directions are unit vectors in the charts of start and end."""

    start: SurfacePoint
    start_direction: complex
    length: float
    end: SurfacePoint
    end_direction: complex
    chain: Tuple[EdgeRef, ...] = ()

    def to_dict(self) -> Dict:
        return {
            "start": _point_dict(self.start),
            "start_direction": [self.start_direction.real, self.start_direction.imag],
            "length": self.length,
            "end": _point_dict(self.end),
            "end_direction": [self.end_direction.real, self.end_direction.imag],
            "chain": [str(e) for e in self.chain],
        }


@dataclass(frozen=True)
class ConeHit:
    point: SurfacePoint
    cycle: Optional[int]
    total_angle: float
    left: Optional[float]
    right: Optional[float]
    passed: bool

    def to_dict(self) -> Dict:
        return {
            "point": _point_dict(self.point),
            "cycle": self.cycle,
            "total_angle": self.total_angle,
            "left": self.left,
            "right": self.right,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class GeodesicPath:
    segments: Tuple[GeodesicSegment, ...]
    length: float
    cone_hits: Tuple[ConeHit, ...] = ()

    @property
    def chain(self) -> Tuple[EdgeRef, ...]:
        return tuple(e for seg in self.segments for e in seg.chain)

    def to_dict(self) -> Dict:
        return {
            "length": self.length,
            "segments": [seg.to_dict() for seg in self.segments],
            "cone_hits": [hit.to_dict() for hit in self.cone_hits],
        }


@dataclass(frozen=True)
class AngleReport:
    passed: bool
    hits: Tuple[ConeHit, ...]
    tolerance: float = TOL

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "hits": [h.to_dict() for h in self.hits], "tolerance": self.tolerance}


@dataclass(frozen=True)
class PlacedPolygon:
    polygon_id: int
    placement: Isometry
    vertices: Tuple[complex, ...]


@dataclass(frozen=True)
class DevelopedChain:
    copies: Tuple[PlacedPolygon, ...]
    edges: Tuple[EdgeRef, ...]
    mismatch: float

    def to_dict(self) -> Dict:
        return {
            "copies": [
                {
                    "polygon_id": c.polygon_id,
                    "sign": c.placement.sign,
                    "shift": [c.placement.shift.real, c.placement.shift.imag],
                    "vertices": [[v.real, v.imag] for v in c.vertices],
                }
                for c in self.copies
            ],
            "edges": [str(e) for e in self.edges],
            "mismatch": self.mismatch,
        }


@dataclass(frozen=True)
class TraceResult:
    pieces: Tuple[Tuple[int, complex, complex], ...]  # (polygon, from, to) in polygon charts
    chain: Tuple[EdgeRef, ...]
    end: SurfacePoint
    end_direction: complex
    isometry: Isometry  # start chart -> end chart


@dataclass(frozen=True)
class PolygonGaussBonnetReport:
    residual: float
    corner_angles: Tuple[float, ...]
    enclosed_cycles: Tuple[int, ...]
    interior_term: float
    boundary_term: float
    tolerance: float = TOLERANCE_CONFIG["verdict_slack"]

    @property
    def passed(self) -> bool:
        return abs(self.residual) < self.tolerance

    def to_dict(self) -> Dict:
        return {
            "residual": self.residual,
            "passed": self.passed,
            "corner_angles": list(self.corner_angles),
            "enclosed_cycles": list(self.enclosed_cycles),
            "interior_term": self.interior_term,
            "boundary_term": self.boundary_term,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class DivergenceReport:
    d_x: float
    d_y: float
    angle_sum: float
    verdict: bool
    equality: bool
    parallelogram: Optional[bool]
    tolerance: float = TOLERANCE_CONFIG["verdict_slack"]

    def to_dict(self) -> Dict:
        return {
            "d_x": self.d_x,
            "d_y": self.d_y,
            "angle_sum": self.angle_sum,
            "verdict": self.verdict,
            "equality": self.equality,
            "parallelogram": self.parallelogram,
            "tolerance": self.tolerance,
        }


def _point_dict(p: SurfacePoint) -> Dict:
    return {"polygon_id": p.polygon_id, "x": p.position.real, "y": p.position.imag}


# ============= DEVELOPING =============

def develop_path(s: HalfTranslationSurface, chain_spec: Sequence[EdgeRef]) -> DevelopedChain:
    """Lay polygon copies out in the plane by unfolding across the given edges in order."""
    if not chain_spec:
        raise PreconditionError("an unfolding chain needs at least one edge", hypothesis="non-empty chain")
    current = chain_spec[0].polygon_id
    placement = IDENTITY
    copies = [PlacedPolygon(current, placement, s.polygons[current].vertices)]
    mismatch = 0.0
    for e in chain_spec:
        e = s.normalize_edge(e)
        if e.polygon_id != current:
            raise PreconditionError(
                f"edge {e} is not an edge of the current copy (polygon {current})", hypothesis="adjacent chain"
            )
        if s.is_boundary(e):
            raise PreconditionError(f"edge {e} is a boundary edge", hypothesis="adjacent chain")
        f, phi = s.gluing_map(e)
        new_placement = placement.compose(phi.inverse())
        a0, a1 = s.edge_endpoints(e)
        b0, b1 = s.edge_endpoints(f)
        mismatch = max(
            mismatch,
            abs(placement(a0) - new_placement(b1)),
            abs(placement(a1) - new_placement(b0)),
        )
        current, placement = f.polygon_id, new_placement
        copies.append(PlacedPolygon(current, placement, tuple(placement(v) for v in s.polygons[current].vertices)))
    return DevelopedChain(tuple(copies), tuple(chain_spec), mismatch)


# ============= STRAIGHT TRACING =============

def _corner_sector_contains(s: HalfTranslationSurface, corner: Corner, direction: complex) -> bool:
    poly = s.polygons[corner.polygon_id]
    angle = ccw_angle(poly.edge_vector(corner.vertex_index), direction)
    if angle > TWO_PI - TOL:
        angle = 0.0
    return angle <= poly.interior_angle(corner.vertex_index) + TOL


def trace_segment(
    s: HalfTranslationSurface, start: SurfacePoint, direction: complex, length: float
) -> TraceResult:
    """Follow a straight ray across gluings; raise if it meets a vertex or the boundary before the end."""
    if length <= 0:
        raise PreconditionError("trace length must be positive", hypothesis="length>0")
    d = complex(direction) / abs(direction)
    pid, z = start.polygon_id, start.position
    iso = IDENTITY
    chain: List[EdgeRef] = []
    pieces: List[Tuple[int, complex, complex]] = []
    remaining = length
    skip: Set[int] = set()

    corner = s.vertex_at(start)
    if corner is not None:
        if not _corner_sector_contains(s, corner, d):
            raise PreconditionError(
                f"direction {d} does not point into polygon {pid} at its vertex {corner.vertex_index}",
                hypothesis="direction into polygon",
            )
        n = s.polygons[pid].n
        skip = {corner.vertex_index, (corner.vertex_index - 1) % n}
    else:
        e = s.edge_at(start)
        if e is not None:
            if cross(s.edge_vector(e), d) < -TOL:
                if s.is_boundary(e):
                    raise PreconditionError(f"direction leaves the surface through {e}", hypothesis="inside")
                f, phi = s.gluing_map(e)
                chain.append(e)
                pid, z, d, iso = f.polygon_id, phi(z), phi.vector(d), phi.compose(iso)
                skip = {f.edge_index}
            else:
                skip = {e.edge_index}

    for _ in range(100000):
        poly = s.polygons[pid]
        best_t, best_edge, best_u = math.inf, None, 0.0
        for i in range(poly.n):
            if i in skip:
                continue
            a, b = poly.edge_endpoints(i)
            edge = b - a
            denom = cross(d, edge)
            if abs(denom) <= 1e-15:
                continue
            t = cross(a - z, edge) / denom
            u = cross(a - z, d) / denom
            if t > TOL and -TOL <= u <= 1 + TOL and t < best_t:
                best_t, best_edge, best_u = t, i, u
        if best_edge is None:
            raise StructuralError(f"ray from {z} in polygon {pid} never leaves the polygon")
        if best_t >= remaining - TOL:
            end = z + remaining * d
            pieces.append((pid, z, end))
            return TraceResult(tuple(pieces), tuple(chain), SurfacePoint(pid, end), d, iso)
        exit_point = z + best_t * d
        pieces.append((pid, z, exit_point))
        if best_u <= TOL or best_u >= 1 - TOL:
            raise PreconditionError(
                f"segment runs into a vertex of polygon {pid} at {exit_point}", hypothesis="avoids vertices"
            )
        e = EdgeRef(pid, best_edge)
        if s.is_boundary(e):
            raise PreconditionError(f"segment reaches the boundary at edge {e}", hypothesis="inside surface")
        f, phi = s.gluing_map(e)
        chain.append(e)
        remaining -= best_t
        pid, z, d, iso = f.polygon_id, phi(exit_point), phi.vector(d), phi.compose(iso)
        skip = {f.edge_index}
    raise BudgetExhaustedError("segment trace did not terminate")


def reverse_segment(s: HalfTranslationSurface, seg: GeodesicSegment) -> GeodesicSegment:
    chain = tuple(s.partner(e)[0] for e in reversed(seg.chain))
    return GeodesicSegment(seg.end, -seg.end_direction, seg.length, seg.start, -seg.start_direction, chain)


# ============= ANGLES AT JUNCTIONS =============

def _angular_coordinate(s: HalfTranslationSurface, corner: Corner, direction: complex) -> float:
    """Angle of a direction around a vertex, measured from the clockwise side of the cycle's first corner."""
    ci, pos = s.corner_lookup[corner]
    cycle = s.vertex_cycles[ci]
    poly = s.polygons[corner.polygon_id]
    local = ccw_angle(poly.edge_vector(corner.vertex_index), direction)
    if local > cycle.angles[pos] + TOL and local > TWO_PI - TOL:
        local = 0.0
    return cycle.offsets[pos] + local


def _chart_change(s: HalfTranslationSurface, frm: SurfacePoint, to: SurfacePoint) -> Isometry:
    """Isometry between two charts of the same regular point on an edge."""
    if frm.polygon_id == to.polygon_id and abs(frm.position - to.position) <= TOL:
        return IDENTITY
    poly = s.polygons[frm.polygon_id]
    for i in range(poly.n):
        a, b = poly.edge_endpoints(i)
        e = EdgeRef(frm.polygon_id, i)
        if point_segment_distance(frm.position, a, b) > TOL or s.is_boundary(e):
            continue
        f, phi = s.gluing_map(e)
        if f.polygon_id == to.polygon_id and abs(phi(frm.position) - to.position) <= 10 * TOL:
            return phi
    raise StructuralError(f"points {frm} and {to} are not the same surface point")


def junction_angles(
    s: HalfTranslationSurface, end: SurfacePoint, d_in: complex, start: SurfacePoint, d_out: complex
) -> Tuple[Optional[float], Optional[float], float, Optional[int]]:
    """(left, right, total angle, cycle) where a path arriving along d_in leaves along d_out.

    At a boundary vertex the side containing the boundary has no angle (None).
    """
    corner_in = s.vertex_at(end)
    if corner_in is not None:
        corner_out = s.vertex_at(start)
        if corner_out is None or s.cycle_of(corner_in) != s.cycle_of(corner_out):
            raise StructuralError(f"segments ending at {end} and starting at {start} do not meet")
        ci = s.cycle_of(corner_in)
        cycle = s.vertex_cycles[ci]
        theta = cycle.total_angle
        a_in = _angular_coordinate(s, corner_in, -d_in)
        a_out = _angular_coordinate(s, corner_out, d_out)
        if cycle.location == INTERIOR:
            right = (a_out - a_in) % theta
            return theta - right, right, theta, ci
        if a_out >= a_in:
            return None, a_out - a_in, theta, ci
        return a_in - a_out, None, theta, ci
    d_out = _chart_change(s, start, end).vector(d_out)
    right = (cmath.phase(d_out) - cmath.phase(-d_in)) % TWO_PI
    return TWO_PI - right, right, TWO_PI, None


def check_angle_condition(s: HalfTranslationSurface, path: GeodesicPath) -> AngleReport:
    """Both side angles at every junction must be at least pi."""
    hits = []
    threshold = math.pi - TOL
    for seg_in, seg_out in zip(path.segments, path.segments[1:]):
        left, right, theta, ci = junction_angles(s, seg_in.end, seg_in.end_direction, seg_out.start, seg_out.start_direction)
        passed = all(side is None or side >= threshold for side in (left, right))
        hits.append(ConeHit(seg_in.end, ci, theta, left, right, passed))
    return AngleReport(all(h.passed for h in hits), tuple(hits))


# ============= WINDOW SWEEP =============

@dataclass(frozen=True)
class _Copy:
    """One planar copy of a source point inside a triangle."""

    triangle: int
    position: complex
    exits: Tuple[int, ...]
    start: SurfacePoint
    iso: Isometry
    depth: int
    chain: Tuple[EdgeRef, ...]


@dataclass(frozen=True)
class _Sighting:
    distance: float
    chain: Tuple[EdgeRef, ...]
    segment: GeodesicSegment


def _better(new: _Sighting, old: Optional[_Sighting], tie: float) -> bool:
    if old is None or new.distance < old.distance - tie:
        return True
    return abs(new.distance - old.distance) <= tie and new.chain < old.chain


def _wedge_interval(S: complex, D0: complex, D1: complex, X0: complex, X1: complex) -> Optional[Tuple[float, float]]:
    """Parameters v in [0,1] with X0 + v(X1-X0) inside the wedge spanned clockwise from D0 to D1."""
    lo, hi = 0.0, 1.0
    E = X1 - X0
    scale = abs(E) * max(abs(D0), abs(D1), abs(X0 - S))
    for a, b in ((cross(D0, X0 - S), cross(D0, E)), (cross(X0 - S, D1), cross(E, D1))):
        # a + b*v <= 0
        if abs(b) <= 1e-14 * scale:
            if a > 1e-12 * scale:
                return None
            continue
        root = -a / b
        if b > 0:
            hi = min(hi, root)
        else:
            lo = max(lo, root)
    if hi - lo <= 1e-12:
        return None
    return lo, hi


class GeodesicSolver:
    """Shortest geodesics on one surface; vertex-to-vertex sightings are cached."""

    def __init__(self, s: HalfTranslationSurface, budget: Optional[int] = None):
        budget = GEODESIC_CONFIG["default_budget"] if budget is None else budget
        if budget < 1:
            raise PreconditionError("budget must be at least 1", hypothesis="budget>=1")
        if s.has_free_boundary:
            raise PreconditionError("geodesics need closed surfaces or horizontal boundary", hypothesis="no free boundary")
        for cycle in s.vertex_cycles:
            if round(cycle.total_angle / math.pi) > GEODESIC_CONFIG["prong_cap"]:
                raise PreconditionError("cone angle exceeds the branching cap", hypothesis="prongs<=cap")
        self.surface = s
        self.budget = budget
        self.tri: Triangulation = triangulate(s)
        self.tie = GEODESIC_CONFIG["tie_tolerance"]
        self.truncated = False
        self._vertex_graph: Optional[Dict[int, Dict[int, _Sighting]]] = None

    # ---- source and target placement ----

    def _vertex_cycle_of(self, point: SurfacePoint) -> Optional[int]:
        corner = self.surface.vertex_at(point)
        return None if corner is None else self.surface.cycle_of(corner)

    def _images(self, point: SurfacePoint) -> List[Tuple[SurfacePoint, Isometry, Tuple[EdgeRef, ...]]]:
        """Charts of a non-vertex point: its own polygon and, on a glued edge, the partner."""
        s = self.surface
        images = [(point, IDENTITY, ())]
        e = s.edge_at(point)
        if e is not None and not s.is_boundary(e):
            f, phi = s.gluing_map(e)
            images.append((SurfacePoint(f.polygon_id, phi(point.position)), phi, (e,)))
        return images

    def _copies(self, point: SurfacePoint) -> List[_Copy]:
        T = self.tri
        ci = self._vertex_cycle_of(point)
        copies = []
        if ci is not None:
            for t, tri in enumerate(T.surface.polygons):
                for j in range(3):
                    corner = T.original_corner(t, j)
                    if self.surface.cycle_of(corner) == ci:
                        start = SurfacePoint(corner.polygon_id, tri.vertex(j))
                        copies.append(_Copy(t, tri.vertex(j), ((j + 1) % 3,), start, IDENTITY, 0, ()))
            return copies
        for image, iso, chain in self._images(point):
            for t in T.locate(image):
                tri = T.surface.polygons[t]
                exits = tuple(
                    j for j in range(3)
                    if point_segment_distance(image.position, *tri.edge_endpoints(j)) > TOL
                )
                copies.append(_Copy(t, image.position, exits, point, iso, len(chain), chain))
        return copies

    def _point_targets(self, point: SurfacePoint) -> Dict[int, List[complex]]:
        by_triangle: Dict[int, List[complex]] = {}
        for image, _, _ in self._images(point):
            for t in self.tri.locate(image):
                by_triangle.setdefault(t, []).append(image.position)
        return by_triangle

    # ---- sweep ----

    def _sweep(
        self,
        source: SurfacePoint,
        vertex_targets: Set[int],
        point_targets: Optional[Dict[int, List[complex]]] = None,
    ) -> Dict[object, _Sighting]:
        T = self.tri
        tris = T.surface.polygons
        point_targets = point_targets or {}
        keys = {("v", c) for c in vertex_targets}
        if point_targets:
            keys.add("q")
        best: Dict[object, _Sighting] = {}
        heap: List = []
        counter = itertools.count()
        max_windows = GEODESIC_CONFIG["max_windows"]

        def radius() -> float:
            if len(best) < len(keys):
                return math.inf
            return max(b.distance for b in best.values()) + self.tie

        def see(key, copy: _Copy, iso: Isometry, S: complex, t: int, Z: complex, chain) -> None:
            w = Z - S
            dist = abs(w)
            if dist <= TOL:
                return
            segment = GeodesicSegment(
                start=copy.start,
                start_direction=iso.inverse().vector(w) / dist,
                length=dist,
                end=SurfacePoint(T.parent_polygon[t], Z),
                end_direction=w / dist,
                chain=chain,
            )
            candidate = _Sighting(dist, chain, segment)
            if _better(candidate, best.get(key), self.tie):
                best[key] = candidate

        def look(t: int, copy: _Copy, iso: Isometry, S: complex, chain, inside) -> None:
            tri = tris[t]
            for j in range(3):
                ci = self.surface.cycle_of(T.original_corner(t, j))
                if ci in vertex_targets and inside(tri.vertex(j)):
                    see(("v", ci), copy, iso, S, t, tri.vertex(j), chain)
            for Z in point_targets.get(t, ()):
                if inside(Z):
                    see("q", copy, iso, S, t, Z, chain)

        def launch(t: int, j: int, v0: float, v1: float, S: complex, iso: Isometry, depth: int, chain, copy) -> None:
            e = EdgeRef(t, j)
            if T.surface.is_boundary(e):
                return
            X0, X1 = tris[t].edge_endpoints(j)
            lower = point_segment_distance(S, X0 + v0 * (X1 - X0), X0 + v1 * (X1 - X0))
            if lower > radius():
                return
            parent = T.parent_edge[t][j]
            if parent is not None:
                depth += 1
                chain = chain + (parent,)
                if depth > self.budget:
                    self.truncated = True
                    return
            f, phi = T.surface.gluing_map(e)
            heapq.heappush(
                heap,
                (lower, next(counter), f.polygon_id, f.edge_index, 1 - v1, 1 - v0, phi(S), phi.compose(iso), depth, chain, copy),
            )

        for copy in self._copies(source):
            S = copy.position
            look(copy.triangle, copy, copy.iso, S, copy.chain, lambda W: True)
            for j in copy.exits:
                launch(copy.triangle, j, 0.0, 1.0, S, copy.iso, copy.depth, copy.chain, copy)

        processed = 0
        while heap:
            lower, _, t, k, u0, u1, S, iso, depth, chain, copy = heapq.heappop(heap)
            if lower > radius():
                break
            processed += 1
            if processed > max_windows:
                logger.warning("window sweep stopped after %d windows", max_windows)
                self.truncated = True
                break
            tri = tris[t]
            F0, F1, V = tri.vertex(k), tri.vertex(k + 1), tri.vertex(k + 2)
            P0, P1 = F0 + u0 * (F1 - F0), F0 + u1 * (F1 - F0)
            D0, D1 = P0 - S, P1 - S
            slack = 1e-12 * max(abs(D0), abs(D1))

            def inside(W: complex, D0=D0, D1=D1, S=S, slack=slack) -> bool:
                w = W - S
                return cross(D0, w) <= slack * abs(w) and cross(w, D1) <= slack * abs(w)

            look(t, copy, iso, S, chain, inside)
            for j, X0, X1 in (((k + 1) % 3, F1, V), ((k + 2) % 3, V, F0)):
                interval = _wedge_interval(S, D0, D1, X0, X1)
                if interval is not None:
                    launch(t, j, interval[0], interval[1], S, iso, depth, chain, copy)

        logger.debug("sweep from %s: %d windows, %d sightings", source, processed, len(best))
        return best

    # ---- graph ----

    def vertex_graph(self) -> Dict[int, Dict[int, _Sighting]]:
        if self._vertex_graph is None:
            s = self.surface
            graph: Dict[int, Dict[int, _Sighting]] = {}
            for ci, cycle in enumerate(s.vertex_cycles):
                others = set(range(len(s.vertex_cycles))) - {ci}
                if not others:
                    graph[ci] = {}
                    continue
                corner = cycle.corners[0]
                point = SurfacePoint(corner.polygon_id, s.polygons[corner.polygon_id].vertex(corner.vertex_index))
                seen = self._sweep(point, others)
                graph[ci] = {key[1]: sighting for key, sighting in seen.items()}
            self._vertex_graph = graph
        return self._vertex_graph

    def between(self, p: SurfacePoint, q: SurfacePoint) -> GeodesicPath:
        s = self.surface
        p, q = canonicalize_point(s, p), canonicalize_point(s, q)
        cp, cq = self._vertex_cycle_of(p), self._vertex_cycle_of(q)
        if (cp is not None and cp == cq) or (
            cp is None and p.polygon_id == q.polygon_id and abs(p.position - q.position) <= TOL
        ):
            return GeodesicPath((), 0.0, ())

        all_cycles = set(range(len(s.vertex_cycles)))
        graph = self.vertex_graph()
        start = ("v", cp) if cp is not None else "p"
        goal = ("v", cq) if cq is not None else "q"

        edges: Dict[object, Dict[object, GeodesicSegment]] = {}
        from_p = self._sweep(p, all_cycles - ({cp} if cp is not None else set()),
                             self._point_targets(q) if cq is None else None)
        edges[start] = {}
        for key, sighting in from_p.items():
            edges[start][key] = sighting.segment
        for ci, row in graph.items():
            node = ("v", ci)
            edges.setdefault(node, {})
            for cj, sighting in row.items():
                if ("v", cj) != start:
                    edges[node].setdefault(("v", cj), sighting.segment)
        if cq is None:
            from_q = self._sweep(q, all_cycles)
            for key, sighting in from_q.items():
                edges.setdefault(key, {})[goal] = reverse_segment(s, sighting.segment)

        segments = self._dijkstra(edges, start, goal)
        if segments is None:
            raise BudgetExhaustedError(
                f"no geodesic from {p} to {q} within {self.budget} unfoldings", budget=self.budget
            )
        path = GeodesicPath(tuple(segments), sum(seg.length for seg in segments))
        report = check_angle_condition(s, path)
        if not report.passed:
            raise BudgetExhaustedError(
                f"shortest path within budget {self.budget} bends below pi at a vertex; raise the budget",
                budget=self.budget,
            )
        return GeodesicPath(path.segments, path.length, report.hits)

    def _dijkstra(self, edges, start, goal) -> Optional[List[GeodesicSegment]]:
        labels: Dict[object, Tuple[float, Tuple[EdgeRef, ...], List[GeodesicSegment]]] = {start: (0.0, (), [])}
        done: Set[object] = set()
        while True:
            open_nodes = [n for n in labels if n not in done]
            if not open_nodes:
                return None
            node = open_nodes[0]
            for other in open_nodes[1:]:
                a, b = labels[other], labels[node]
                if a[0] < b[0] - self.tie or (abs(a[0] - b[0]) <= self.tie and a[1] < b[1]):
                    node = other
            if node == goal:
                return labels[node][2]
            done.add(node)
            dist, chain, segs = labels[node]
            for nxt, seg in edges.get(node, {}).items():
                if nxt in done:
                    continue
                candidate = (dist + seg.length, chain + seg.chain, segs + [seg])
                old = labels.get(nxt)
                if old is None or candidate[0] < old[0] - self.tie or (
                    abs(candidate[0] - old[0]) <= self.tie and candidate[1] < old[1]
                ):
                    labels[nxt] = candidate


def geodesic_between(
    s: HalfTranslationSurface, p: SurfacePoint, q: SurfacePoint, budget: Optional[int] = None
) -> GeodesicPath:
    """
    Shortest geodesic from p to q.

    Args:
        s: Surface holding both points
        p: Start point in polygon coordinates
        q: End point in polygon coordinates
        budget: Most polygon edges a single straight piece may cross; GEODESIC_CONFIG default when None

    Returns:
        GeodesicPath: straight segments joined at cone points, with total length and edge chain

    Raises:
        BudgetExhaustedError: no path found within the budget
    """
    return GeodesicSolver(s, budget).between(p, q)


# ============= POLYGON GAUSS-BONNET =============

def _flatten(paths: Sequence[GeodesicPath]) -> List[GeodesicSegment]:
    return [seg for path in paths for seg in path.segments]


def _same_point(s: HalfTranslationSurface, a: SurfacePoint, b: SurfacePoint) -> bool:
    ca, cb = canonicalize_point(s, a), canonicalize_point(s, b)
    return ca.polygon_id == cb.polygon_id and abs(ca.position - cb.position) <= 10 * TOL


def _enclosed_cycles(
    s: HalfTranslationSurface, pieces: Sequence[Tuple[int, complex, complex]], touched: Set[int]
) -> List[int]:
    """Vertex cycles inside a counterclockwise curve, found by labelling the faces the curve cuts out."""
    scale = diameter_bound(s)
    eta, overshoot = 1e-6 * scale, 1e-9 * scale
    by_polygon: Dict[int, List[Tuple[complex, complex]]] = {}
    for pid, a, b in pieces:
        if abs(b - a) > overshoot:
            by_polygon.setdefault(pid, []).append((a, b))

    faces: List[Tuple[int, object]] = []
    for pid, poly in enumerate(s.polygons):
        shape = poly.to_shapely()
        lines = [LineString([(v.real, v.imag) for v in poly.vertices + (poly.vertices[0],)])]
        for a, b in by_polygon.get(pid, []):
            u = (b - a) / abs(b - a)
            a2, b2 = a - overshoot * u, b + overshoot * u
            lines.append(LineString([(a2.real, a2.imag), (b2.real, b2.imag)]))
        for face in polygonize(unary_union(lines)):
            if shape.covers(face.representative_point()):
                faces.append((pid, face))

    def face_at(pid: int, z: complex) -> int:
        inside = Point(z.real, z.imag)
        for index, (fpid, face) in enumerate(faces):
            if fpid == pid and face.covers(inside):
                return index
        raise StructuralError(f"point {z} in polygon {pid} lies in no face")

    parent = list(range(len(faces)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for pid, poly in enumerate(s.polygons):
        for i in range(poly.n):
            e = EdgeRef(pid, i)
            if s.is_boundary(e):
                continue
            a, b = poly.edge_endpoints(i)
            cuts = {0.0, 1.0}
            for qa, qb in by_polygon.get(pid, []):
                for z in (qa, qb):
                    if point_segment_distance(z, a, b) <= 10 * TOL:
                        cuts.add(min(1.0, max(0.0, dot(z - a, b - a) / dot(b - a, b - a))))
            f, phi = s.gluing_map(e)
            inward = 1j * (b - a) / abs(b - a)
            inward_f = 1j * s.edge_vector(f) / abs(s.edge_vector(f))
            ordered = sorted(cuts)
            for t0, t1 in zip(ordered, ordered[1:]):
                if t1 - t0 <= 1e-9:
                    continue
                m = a + 0.5 * (t0 + t1) * (b - a)
                fa = face_at(pid, m + eta * inward)
                fb = face_at(f.polygon_id, phi(m) + eta * inward_f)
                parent[find(fa)] = find(fb)

    labels: Dict[int, bool] = {}
    for pid, segs in by_polygon.items():
        for a, b in segs:
            if abs(b - a) <= 20 * eta:
                continue
            mid, normal = 0.5 * (a + b), 1j * (b - a) / abs(b - a)
            for z, value in ((mid + eta * normal, True), (mid - eta * normal, False)):
                root = find(face_at(pid, z))
                if labels.setdefault(root, value) != value:
                    raise StructuralError("curve is not simple or is not oriented counterclockwise")

    enclosed = []
    for ci, cycle in enumerate(s.vertex_cycles):
        if ci in touched:
            continue
        corner = cycle.corners[0]
        poly = s.polygons[corner.polygon_id]
        out = poly.edge_vector(corner.vertex_index)
        bisector = out / abs(out) * cmath.exp(0.5j * cycle.angles[0])
        root = find(face_at(corner.polygon_id, poly.vertex(corner.vertex_index) + eta * bisector))
        if root not in labels:
            raise StructuralError(f"cannot decide whether vertex cycle {ci} is enclosed")
        if labels[root]:
            enclosed.append(ci)
    return enclosed


def polygon_gauss_bonnet(s: HalfTranslationSurface, closed_geodesic_polygon: Sequence[GeodesicPath]) -> PolygonGaussBonnetReport:
    """Curvature balance of a counterclockwise geodesic polygon bounding a disk."""
    segments = _flatten(closed_geodesic_polygon)
    if not segments:
        raise PreconditionError("empty curve", hypothesis="closed curve")
    for seg_in, seg_out in zip(segments, segments[1:] + segments[:1]):
        if not _same_point(s, seg_in.end, seg_out.start):
            raise PreconditionError(f"curve is not closed at {seg_in.end}", hypothesis="closed curve")

    corners: List[float] = []
    touched: Set[int] = set()
    for seg_in, seg_out in zip(segments, segments[1:] + segments[:1]):
        left, _, theta, ci = junction_angles(s, seg_in.end, seg_in.end_direction, seg_out.start, seg_out.start_direction)
        if left is None:
            raise PreconditionError("curve runs along the boundary", hypothesis="interior curve")
        if left <= TOL or left >= theta - TOL:
            raise PreconditionError("curve folds back on itself", hypothesis="simple curve")
        if ci is not None:
            touched.add(ci)
        if abs(left - math.pi) > TOL or ci is not None:
            corners.append(left)
    if len(corners) < 3:
        raise PreconditionError(
            f"a geodesic polygon needs at least three corners, found {len(corners)}", hypothesis="polygon"
        )

    pieces = []
    for seg in segments:
        pieces.extend(trace_segment(s, seg.start, seg.start_direction, seg.length).pieces)
    enclosed = _enclosed_cycles(s, pieces, touched)
    interior = sum(TWO_PI - s.vertex_cycles[ci].total_angle for ci in enclosed)
    boundary = sum(math.pi - angle for angle in corners)
    residual = interior + boundary - TWO_PI
    return PolygonGaussBonnetReport(residual, tuple(corners), tuple(enclosed), interior, boundary)


# ============= DIVERGENCE OF QUADRILATERALS =============

def _unoriented(u: complex, v: complex) -> float:
    return abs(cmath.phase(v / u))


def planar_quad_divergence(x0: complex, x1: complex, y0: complex, y1: complex) -> DivergenceReport:
    slack = TOLERANCE_CONFIG["verdict_slack"]
    if abs(abs(y0 - x0) - abs(y1 - x1)) > TOL:
        raise PreconditionError("sides [x0,y0] and [x1,y1] differ in length", hypothesis="equal_lengths")
    if min(abs(x1 - x0), abs(y0 - x0), abs(y1 - x1)) <= TOL:
        raise PreconditionError("degenerate quadrilateral", hypothesis="distinct_points")
    angle_sum = _unoriented(x1 - x0, y0 - x0) + _unoriented(x0 - x1, y1 - x1)
    if angle_sum < math.pi - TOL:
        raise PreconditionError(f"angle sum {angle_sum:.12g} is below pi", hypothesis="angle_sum")
    d_x, d_y = abs(x1 - x0), abs(y1 - y0)
    equality = abs(d_y - d_x) <= slack
    parallelogram = abs((y1 - y0) - (x1 - x0)) <= slack if equality else None
    return DivergenceReport(d_x, d_y, angle_sum, d_y >= d_x - slack, equality, parallelogram)


def quad_divergence(
    s: HalfTranslationSurface,
    x0: SurfacePoint,
    x1: SurfacePoint,
    y0: SurfacePoint,
    y1: SurfacePoint,
    budget: Optional[int] = None,
) -> DivergenceReport:
    """
    Check d(y0,y1) >= d(x0,x1) for a geodesic quadrilateral.

    The legs [x0,y0] and [x1,y1] must have equal length and the angles they make
    with [x0,x1] must sum to at least pi.

    Args:
        s: Surface holding the four points
        x0, x1: Regular points spanning the base side
        y0, y1: Far ends of the two legs
        budget: Edge-crossing budget passed to the geodesic solver

    Returns:
        DivergenceReport: both side lengths, the angle sum, the verdict and, in the
        equality case, whether the quadrilateral develops to a parallelogram

    Raises:
        PreconditionError: a hypothesis fails; its name is in the hypothesis field
    """
    slack = TOLERANCE_CONFIG["verdict_slack"]
    solver = GeodesicSolver(s, budget)
    for point in (x0, x1):
        if s.vertex_at(canonicalize_point(s, point)) is not None:
            raise PreconditionError("x0 and x1 must be regular points", hypothesis="regular_points")
    g0, g1 = solver.between(x0, y0), solver.between(x1, y1)
    gx, gy = solver.between(x0, x1), solver.between(y0, y1)
    if abs(g0.length - g1.length) > TOL:
        raise PreconditionError(
            f"geodesics [x0,y0] and [x1,y1] have lengths {g0.length:.12g} and {g1.length:.12g}",
            hypothesis="equal_lengths",
        )
    if not (g0.segments and g1.segments and gx.segments):
        raise PreconditionError("degenerate quadrilateral", hypothesis="distinct_points")

    sx_start, sx_end = gx.segments[0], gx.segments[-1]
    s0, s1 = g0.segments[0], g1.segments[0]
    dir_x0 = sx_start.start_direction
    dir_y0 = _chart_change(s, s0.start, sx_start.start).vector(s0.start_direction)
    back_x1 = -sx_end.end_direction
    dir_y1 = _chart_change(s, s1.start, sx_end.end).vector(s1.start_direction)
    angle_sum = _unoriented(dir_x0, dir_y0) + _unoriented(back_x1, dir_y1)
    if angle_sum < math.pi - TOL:
        raise PreconditionError(f"angle sum {angle_sum:.12g} is below pi", hypothesis="angle_sum")

    d_x, d_y = gx.length, gy.length
    equality = abs(d_y - d_x) <= slack
    parallelogram = None
    if equality:
        parallelogram = False
        if len(gx.segments) == 1 and len(g0.segments) == 1 and len(g1.segments) == 1:
            holonomy = 1 if (sx_end.end_direction / sx_start.start_direction).real > 0 else -1
            X1 = d_x * dir_x0
            Y0 = g0.length * dir_y0
            Y1 = X1 + g1.length * holonomy * dir_y1
            parallelogram = abs((Y1 - Y0) - X1) <= slack and abs(abs(Y1 - Y0) - d_y) <= slack
    return DivergenceReport(d_x, d_y, angle_sum, d_y >= d_x - slack, equality, parallelogram)


# ============= MESH ORACLE =============

def mesh_distance_oracle(
    s: HalfTranslationSurface,
    pairs: Sequence[Tuple[SurfacePoint, SurfacePoint]],
    resolution: Optional[int] = None,
) -> np.ndarray:
    """Graph distances on a Steiner-point mesh with spacing diameter/resolution.

    Each triangle contributes straight chords between all of its mesh points, so every
    graph path is a genuine surface path and the result never undercuts the true distance.
    """
    resolution = resolution or GEODESIC_CONFIG["oracle_resolution"]
    T = triangulate(s)
    tris = T.surface.polygons
    spacing = diameter_bound(s) / resolution
    node_ids: Dict[object, int] = {}

    def node(key) -> int:
        return node_ids.setdefault(key, len(node_ids))

    divisions: Dict[EdgeRef, int] = {}
    for e in T.surface.edges():
        partner = T.surface.partner(e)
        canonical = e if partner is None else min(e, partner[0])
        divisions[e] = max(1, math.ceil(abs(T.surface.edge_vector(canonical)) / spacing))

    members: Dict[int, List[Tuple[int, complex]]] = {t: [] for t in range(len(tris))}
    for t, tri in enumerate(tris):
        for j in range(3):
            members[t].append((node(("v", s.cycle_of(T.original_corner(t, j)))), tri.vertex(j)))
            e = EdgeRef(t, j)
            m = divisions[e]
            partner = T.surface.partner(e)
            a, b = tri.edge_endpoints(j)
            for k in range(1, m):
                if partner is None or e <= partner[0]:
                    key = ("e", e, k)
                else:
                    key = ("e", partner[0], m - k)
                members[t].append((node(key), a + (k / m) * (b - a)))

    point_nodes: Dict[Tuple[int, complex], int] = {}
    for p in {pt for pair in pairs for pt in pair}:
        corner = s.vertex_at(p)
        if corner is not None:
            point_nodes[(p.polygon_id, p.position)] = node(("v", s.cycle_of(corner)))
            continue
        pid_node = node(("p", p.polygon_id, p.position))
        point_nodes[(p.polygon_id, p.position)] = pid_node
        images = [p]
        e = s.edge_at(p)
        if e is not None and not s.is_boundary(e):
            f, phi = s.gluing_map(e)
            images.append(SurfacePoint(f.polygon_id, phi(p.position)))
        for image in images:
            for t in T.locate(image):
                members[t].append((pid_node, image.position))

    rows, cols, weights = [], [], []
    for t, entries in members.items():
        ids = np.array([i for i, _ in entries], dtype=np.int64)
        pos = np.array([z for _, z in entries], dtype=np.complex128)
        dist = np.abs(pos[:, None] - pos[None, :])
        iu, ju = np.triu_indices(len(ids), k=1)
        rows.append(ids[iu])
        cols.append(ids[ju])
        weights.append(dist[iu, ju])
    n = len(node_ids)
    r, c, w = np.concatenate(rows), np.concatenate(cols), np.concatenate(weights)
    keep = r != c
    r, c, w = r[keep], c[keep], w[keep]
    lo, hi = np.minimum(r, c), np.maximum(r, c)
    keys = lo * n + hi
    order = np.argsort(keys, kind="stable")
    keys, w = keys[order], w[order]
    unique, first = np.unique(keys, return_index=True)
    w = np.maximum(np.minimum.reduceat(w, first), 1e-300)
    graph = csr_matrix((w, (unique // n, unique % n)), shape=(n, n))

    sources = sorted({point_nodes[(p.polygon_id, p.position)] for p, _ in pairs})
    table = dijkstra(graph, directed=False, indices=sources)
    row_of = {src: i for i, src in enumerate(sources)}
    logger.debug("mesh oracle: %d nodes, %d edges", n, len(w))
    return np.array(
        [
            table[row_of[point_nodes[(p.polygon_id, p.position)]], point_nodes[(q.polygon_id, q.position)]]
            for p, q in pairs
        ]
    )
