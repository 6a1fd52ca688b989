"""
Half-translation surfaces as Euclidean polygons glued by z -> ±z + c.
Location: geometry/surface_core.py

Polygons live in natural coordinates. A pairing stores only its sign; the
translation part of every gluing is recovered from the polygon geometry.

Edge i of a polygon runs from vertex i to vertex i+1. A corner (p, k) is the
interior angle of polygon p at vertex k; it is bounded clockwise by the
outgoing edge k and counterclockwise by the incoming edge k-1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from shapely.geometry import LinearRing, Point
from shapely.geometry import Polygon as ShapelyPolygon

from config import TOLERANCE_CONFIG
from geometry.errors import PreconditionError, StructuralError
from utils.logger import get_logger
from utils.validators import is_multiple_of_pi, prong_count

logger = get_logger(__name__)

TOL = TOLERANCE_CONFIG["exact"]

HORIZONTAL = "horizontal"
FREE = "free"
BOUNDARY_KINDS = (HORIZONTAL, FREE)

PUNCTURE = "puncture"
CONE = "cone"
PLAIN = "plain"
MARK_ROLES = (PUNCTURE, CONE, PLAIN)

INTERIOR = "interior"
BOUNDARY = "boundary"


# ----------------------------------------------------------------------
# Planar helpers
# ----------------------------------------------------------------------

def cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def dot(a: complex, b: complex) -> float:
    return a.real * b.real + a.imag * b.imag


def ccw_angle(u: complex, v: complex) -> float:
    """Counterclockwise angle from direction u to direction v, in [0, 2pi)."""
    angle = cmath.phase(v / u)
    if angle < 0:
        angle += 2 * math.pi
    return angle


def point_segment_distance(z: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(z - a)
    t = max(0.0, min(1.0, dot(z - a, d) / dot(d, d)))
    return abs(z - (a + t * d))


def in_closed_triangle(z: complex, a: complex, b: complex, c: complex, tol: float = TOL) -> bool:
    return (
        cross(b - a, z - a) >= -tol
        and cross(c - b, z - b) >= -tol
        and cross(a - c, z - c) >= -tol
    )


# ----------------------------------------------------------------------
# Domain types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Polygon:
    """Counterclockwise simple polygon in natural coordinates."""

    vertices: Tuple[complex, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(complex(v) for v in self.vertices))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex(self, i: int) -> complex:
        return self.vertices[i % self.n]

    def edge_vector(self, i: int) -> complex:
        return self.vertex(i + 1) - self.vertex(i)

    def edge_endpoints(self, i: int) -> Tuple[complex, complex]:
        return self.vertex(i), self.vertex(i + 1)

    @cached_property
    def signed_area(self) -> float:
        total = 0.0
        for i in range(self.n):
            total += cross(self.vertex(i), self.vertex(i + 1))
        return 0.5 * total

    def interior_angle(self, k: int) -> float:
        """Angle at vertex k measured inside the polygon."""
        outgoing = self.edge_vector(k)
        backward = -self.edge_vector(k - 1)
        return ccw_angle(outgoing, backward)

    def to_shapely(self) -> ShapelyPolygon:
        return ShapelyPolygon([(v.real, v.imag) for v in self.vertices])

    def contains(self, z: complex, tol: float = TOL) -> bool:
        """Closed containment with tolerance."""
        return self.to_shapely().distance(Point(z.real, z.imag)) <= tol

    def translated(self, shift: complex) -> "Polygon":
        return Polygon(tuple(v + shift for v in self.vertices), self.name)


@dataclass(frozen=True, order=True)
class EdgeRef:
    polygon_id: int
    edge_index: int

    def __str__(self) -> str:
        return f"{self.polygon_id}.{self.edge_index}"


@dataclass(frozen=True, order=True)
class Corner:
    polygon_id: int
    vertex_index: int


@dataclass(frozen=True)
class Pairing:
    a: EdgeRef
    b: EdgeRef
    sign: int = 1


@dataclass(frozen=True)
class BoundaryEdge:
    edge: EdgeRef
    kind: str = HORIZONTAL


@dataclass(frozen=True)
class SurfacePoint:
    polygon_id: int
    position: complex

    def __post_init__(self):
        object.__setattr__(self, "position", complex(self.position))

    def __str__(self) -> str:
        return f"{self.polygon_id}:{self.position.real!r},{self.position.imag!r}"


@dataclass(frozen=True)
class MarkedPoint:
    point: SurfacePoint
    role: str = PUNCTURE
    name: str = ""


@dataclass(frozen=True)
class Isometry:
    """z -> sign*z + shift with sign in {+1, -1}."""

    sign: int = 1
    shift: complex = 0j

    def __call__(self, z: complex) -> complex:
        return self.sign * z + self.shift

    def vector(self, v: complex) -> complex:
        return self.sign * v

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other."""
        return Isometry(self.sign * other.sign, self.sign * other.shift + self.shift)

    def inverse(self) -> "Isometry":
        return Isometry(self.sign, -self.sign * self.shift)


IDENTITY = Isometry()


@dataclass(frozen=True)
class VertexCycle:
    corners: Tuple[Corner, ...]
    angles: Tuple[float, ...]
    location: str

    @property
    def total_angle(self) -> float:
        return sum(self.angles)

    @property
    def offsets(self) -> Tuple[float, ...]:
        """Angular coordinate at the clockwise side of each corner."""
        out, running = [], 0.0
        for angle in self.angles:
            out.append(running)
            running += angle
        return tuple(out)


@dataclass(frozen=True)
class ConePointReport:
    vertex_cycle: Tuple[Tuple[int, int], ...]
    total_angle: float
    prongs: Optional[int]
    location: str
    singular: bool

    def to_dict(self) -> Dict:
        return {
            "vertex_cycle": [list(c) for c in self.vertex_cycle],
            "total_angle": self.total_angle,
            "prongs": self.prongs,
            "location": self.location,
            "singular": self.singular,
        }


@dataclass
class ValidationReport:
    passed: bool
    checks: Dict[str, bool] = field(default_factory=dict)
    failures: List[Dict] = field(default_factory=list)

    def fail(self, invariant: str, elements: List[str], message: str) -> None:
        self.checks[invariant] = False
        self.passed = False
        self.failures.append({"invariant": invariant, "elements": elements, "message": message})

    def ok(self, invariant: str) -> None:
        self.checks.setdefault(invariant, True)

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "checks": dict(self.checks), "failures": list(self.failures)}


@dataclass(frozen=True)
class GaussBonnetReport:
    lhs: float
    chi: int
    residual: float
    tolerance: float = TOL

    @property
    def passed(self) -> bool:
        return abs(self.residual) < self.tolerance

    def to_dict(self) -> Dict:
        return {
            "lhs": self.lhs,
            "chi": self.chi,
            "residual": self.residual,
            "passed": self.passed,
            "tolerance": self.tolerance,
        }


# ----------------------------------------------------------------------
# Surface
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HalfTranslationSurface:
    polygons: Tuple[Polygon, ...]
    pairings: Tuple[Pairing, ...] = ()
    boundary: Tuple[BoundaryEdge, ...] = ()
    marked_points: Tuple[MarkedPoint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "polygons", tuple(self.polygons))
        object.__setattr__(self, "pairings", tuple(self.pairings))
        object.__setattr__(self, "boundary", tuple(self.boundary))
        object.__setattr__(self, "marked_points", tuple(self.marked_points))

    # ---- edges ----

    def edges(self) -> Iterator[EdgeRef]:
        for pid, poly in enumerate(self.polygons):
            for i in range(poly.n):
                yield EdgeRef(pid, i)

    def polygon(self, pid: int) -> Polygon:
        return self.polygons[pid]

    def edge_vector(self, e: EdgeRef) -> complex:
        return self.polygons[e.polygon_id].edge_vector(e.edge_index)

    def edge_endpoints(self, e: EdgeRef) -> Tuple[complex, complex]:
        return self.polygons[e.polygon_id].edge_endpoints(e.edge_index)

    def normalize_edge(self, e: EdgeRef) -> EdgeRef:
        return EdgeRef(e.polygon_id, e.edge_index % self.polygons[e.polygon_id].n)

    @cached_property
    def _partner_table(self) -> Dict[EdgeRef, Tuple[EdgeRef, int]]:
        table = {}
        for pairing in self.pairings:
            table[pairing.a] = (pairing.b, pairing.sign)
            table[pairing.b] = (pairing.a, pairing.sign)
        return table

    @cached_property
    def _boundary_table(self) -> Dict[EdgeRef, str]:
        return {b.edge: b.kind for b in self.boundary}

    def partner(self, e: EdgeRef) -> Optional[Tuple[EdgeRef, int]]:
        return self._partner_table.get(self.normalize_edge(e))

    def is_boundary(self, e: EdgeRef) -> bool:
        return self.partner(e) is None

    def boundary_kind(self, e: EdgeRef) -> Optional[str]:
        return self._boundary_table.get(self.normalize_edge(e))

    def gluing_map(self, e: EdgeRef) -> Tuple[EdgeRef, Isometry]:
        """Partner edge and the isometry from e's polygon chart to the partner's chart."""
        e = self.normalize_edge(e)
        found = self.partner(e)
        if found is None:
            raise PreconditionError(f"edge {e} is a boundary edge", hypothesis="paired edge")
        f, sign = found
        start_e, _ = self.edge_endpoints(e)
        _, end_f = self.edge_endpoints(f)
        return f, Isometry(sign, end_f - sign * start_e)

    @property
    def has_boundary(self) -> bool:
        return any(True for e in self.edges() if self.is_boundary(e))

    @property
    def has_free_boundary(self) -> bool:
        return any(self.boundary_kind(e) != HORIZONTAL for e in self.edges() if self.is_boundary(e))

    def polygon_index(self, name: str) -> int:
        for pid, poly in enumerate(self.polygons):
            if poly.name == name:
                return pid
        raise KeyError(f"no polygon named {name!r}")

    # ---- vertex cycles ----

    def next_ccw(self, corner: Corner) -> Optional[Corner]:
        """Corner reached by rotating counterclockwise across the incoming edge."""
        poly = self.polygons[corner.polygon_id]
        incoming = EdgeRef(corner.polygon_id, (corner.vertex_index - 1) % poly.n)
        found = self.partner(incoming)
        if found is None:
            return None
        f, _ = found
        return Corner(f.polygon_id, f.edge_index)

    def next_cw(self, corner: Corner) -> Optional[Corner]:
        found = self.partner(EdgeRef(corner.polygon_id, corner.vertex_index))
        if found is None:
            return None
        f, _ = found
        n = self.polygons[f.polygon_id].n
        return Corner(f.polygon_id, (f.edge_index + 1) % n)

    def corners(self) -> Iterator[Corner]:
        for pid, poly in enumerate(self.polygons):
            for k in range(poly.n):
                yield Corner(pid, k)

    @cached_property
    def vertex_cycles(self) -> Tuple[VertexCycle, ...]:
        total = sum(p.n for p in self.polygons)
        visited = set()
        cycles: List[VertexCycle] = []

        def angle_of(c: Corner) -> float:
            return self.polygons[c.polygon_id].interior_angle(c.vertex_index)

        for corner in self.corners():
            if corner in visited or self.partner(EdgeRef(corner.polygon_id, corner.vertex_index)) is not None:
                continue
            chain = [corner]
            visited.add(corner)
            current = self.next_ccw(corner)
            while current is not None:
                if current in visited:
                    raise StructuralError(f"corner {current} reached twice while walking a boundary vertex")
                chain.append(current)
                visited.add(current)
                current = self.next_ccw(current)
            cycles.append(VertexCycle(tuple(chain), tuple(angle_of(c) for c in chain), BOUNDARY))

        for corner in self.corners():
            if corner in visited:
                continue
            chain = [corner]
            visited.add(corner)
            current = self.next_ccw(corner)
            while current != corner:
                if current is None or current in visited or len(chain) > total:
                    raise StructuralError(f"vertex cycle through corner {corner} does not close")
                chain.append(current)
                visited.add(current)
                current = self.next_ccw(current)
            cycles.append(VertexCycle(tuple(chain), tuple(angle_of(c) for c in chain), INTERIOR))

        return tuple(cycles)

    @cached_property
    def corner_lookup(self) -> Dict[Corner, Tuple[int, int]]:
        """corner -> (cycle index, position inside the cycle)."""
        table = {}
        for ci, cycle in enumerate(self.vertex_cycles):
            for pos, corner in enumerate(cycle.corners):
                table[corner] = (ci, pos)
        return table

    def cycle_of(self, corner: Corner) -> int:
        n = self.polygons[corner.polygon_id].n
        return self.corner_lookup[Corner(corner.polygon_id, corner.vertex_index % n)][0]

    def edge_cycles(self, e: EdgeRef) -> Tuple[int, int]:
        """Vertex cycles at the start and end of an edge."""
        return (
            self.cycle_of(Corner(e.polygon_id, e.edge_index)),
            self.cycle_of(Corner(e.polygon_id, e.edge_index + 1)),
        )

    def cycle_is_horizontal(self, cycle: VertexCycle) -> bool:
        if cycle.location == INTERIOR:
            return True
        first, last = cycle.corners[0], cycle.corners[-1]
        poly_last = self.polygons[last.polygon_id]
        cw_edge = EdgeRef(first.polygon_id, first.vertex_index)
        ccw_edge = EdgeRef(last.polygon_id, (last.vertex_index - 1) % poly_last.n)
        return self.boundary_kind(cw_edge) == HORIZONTAL and self.boundary_kind(ccw_edge) == HORIZONTAL

    # ---- points ----

    def vertex_at(self, point: SurfacePoint, tol: float = TOL) -> Optional[Corner]:
        poly = self.polygons[point.polygon_id]
        for k, v in enumerate(poly.vertices):
            if abs(point.position - v) <= tol:
                return Corner(point.polygon_id, k)
        return None

    def edge_at(self, point: SurfacePoint, tol: float = TOL) -> Optional[EdgeRef]:
        poly = self.polygons[point.polygon_id]
        for i in range(poly.n):
            a, b = poly.edge_endpoints(i)
            if point_segment_distance(point.position, a, b) <= tol:
                return EdgeRef(point.polygon_id, i)
        return None


# ----------------------------------------------------------------------
# Public API
# ----------------------------------------------------------------------

def validate_surface(s: HalfTranslationSurface) -> ValidationReport:
    """
    Report pass/fail per structural invariant with offending elements.

    Args:
        s: Surface as loaded, before any triangulation

    Returns:
        ValidationReport: a flag per invariant, plus the offending elements of each failure
    """
    report = ValidationReport(passed=True)
    n_polys = len(s.polygons)

    # Polygons
    for pid, poly in enumerate(s.polygons):
        label = poly.name or str(pid)
        if poly.n < 3:
            report.fail("polygon_vertex_count", [label], f"polygon {label} has {poly.n} vertices")
            continue
        report.ok("polygon_vertex_count")
        if any(abs(poly.vertex(i + 1) - poly.vertex(i)) <= TOL for i in range(poly.n)):
            report.fail("polygon_distinct_vertices", [label], f"polygon {label} repeats a vertex")
            continue
        report.ok("polygon_distinct_vertices")
        if poly.signed_area <= TOL:
            report.fail("polygon_orientation", [label], f"polygon {label} has signed area {poly.signed_area}")
        else:
            report.ok("polygon_orientation")
        ring = LinearRing([(v.real, v.imag) for v in poly.vertices])
        if not ring.is_simple:
            report.fail("polygon_simple", [label], f"polygon {label} self-intersects")
        else:
            report.ok("polygon_simple")

    def in_range(e: EdgeRef) -> bool:
        return 0 <= e.polygon_id < n_polys and 0 <= e.edge_index < s.polygons[e.polygon_id].n

    # Pairings and boundary coverage
    seen: Dict[EdgeRef, int] = {}
    for pairing in s.pairings:
        for e in (pairing.a, pairing.b):
            seen[e] = seen.get(e, 0) + 1
        if not (in_range(pairing.a) and in_range(pairing.b)):
            report.fail("edge_refs_in_range", [str(pairing.a), str(pairing.b)], "pairing references a missing edge")
            continue
        report.ok("edge_refs_in_range")
        if pairing.sign not in (1, -1):
            report.fail("pairing_sign", [str(pairing.a), str(pairing.b)], f"sign {pairing.sign} is not +1 or -1")
            continue
        va, vb = s.edge_vector(pairing.a), s.edge_vector(pairing.b)
        if abs(abs(va) - abs(vb)) > TOL:
            report.fail(
                "pairing_length",
                [str(pairing.a), str(pairing.b)],
                f"edge lengths {abs(va):.12g} and {abs(vb):.12g} differ",
            )
            continue
        report.ok("pairing_length")
        expected = -va if pairing.sign == 1 else va
        if abs(vb - expected) > TOL:
            report.fail(
                "pairing_vector",
                [str(pairing.a), str(pairing.b)],
                f"sign={pairing.sign:+d} requires edge vector {expected} but found {vb}",
            )
        else:
            report.ok("pairing_vector")

    for b in s.boundary:
        seen[b.edge] = seen.get(b.edge, 0) + 1
        if not in_range(b.edge):
            report.fail("edge_refs_in_range", [str(b.edge)], "boundary flag references a missing edge")
            continue
        if b.kind not in BOUNDARY_KINDS:
            report.fail("boundary_kind", [str(b.edge)], f"unknown boundary kind {b.kind!r}")
        elif b.kind == HORIZONTAL and abs(s.edge_vector(b.edge).imag) > TOL:
            report.fail("horizontal_boundary", [str(b.edge)], "horizontal boundary edge is not horizontal")
        else:
            report.ok("horizontal_boundary")

    duplicated = sorted(e for e, count in seen.items() if count > 1)
    if duplicated:
        report.fail("pairing_involution", [str(e) for e in duplicated], "edge used more than once")
    else:
        report.ok("pairing_involution")

    uncovered = [e for e in s.edges() if e not in seen]
    if uncovered:
        report.fail("edge_coverage", [str(e) for e in uncovered], "edge neither paired nor boundary")
    else:
        report.ok("edge_coverage")

    # Cone angles (only meaningful once the combinatorics are sound)
    if report.passed:
        try:
            for cycle in s.vertex_cycles:
                needs_multiple = cycle.location == INTERIOR or s.cycle_is_horizontal(cycle)
                if needs_multiple and not is_multiple_of_pi(cycle.total_angle):
                    corners = [f"{c.polygon_id}:{c.vertex_index}" for c in cycle.corners]
                    report.fail(
                        "cone_angles",
                        corners,
                        f"{cycle.location} cycle angle {cycle.total_angle:.12g} is not a multiple of pi",
                    )
            report.ok("cone_angles")
        except StructuralError as exc:
            report.fail("cone_angles", [], str(exc))

    total_area = sum(p.signed_area for p in s.polygons)
    if total_area <= 0:
        report.fail("area_positive", [], f"total area {total_area}")
    else:
        report.ok("area_positive")

    for mark in s.marked_points:
        label = mark.name or str(mark.point)
        if mark.role not in MARK_ROLES:
            report.fail("marked_point_role", [label], f"unknown role {mark.role!r}")
        pid = mark.point.polygon_id
        if not 0 <= pid < n_polys or not s.polygons[pid].contains(mark.point.position):
            report.fail("marked_points_inside", [label], "marked point outside its polygon")
        else:
            report.ok("marked_points_inside")

    if not report.passed:
        logger.info("surface failed validation: %s", [f["invariant"] for f in report.failures])
    return report


def require_valid(s: HalfTranslationSurface) -> None:
    report = validate_surface(s)
    if not report.passed:
        first = report.failures[0]
        raise StructuralError(f"{first['invariant']}: {first['message']} ({', '.join(first['elements'])})")


def cone_points(s: HalfTranslationSurface) -> List[ConePointReport]:
    """Partition the vertices into identification cycles and report their angles."""
    reports = []
    for cycle in s.vertex_cycles:
        angle = cycle.total_angle
        constrained = cycle.location == INTERIOR or s.cycle_is_horizontal(cycle)
        prongs: Optional[int] = None
        if is_multiple_of_pi(angle):
            prongs = prong_count(angle)
        elif constrained:
            raise StructuralError(f"{cycle.location} cone angle {angle!r} is not an integer multiple of pi")
        regular = 2 if cycle.location == INTERIOR else 1
        reports.append(
            ConePointReport(
                vertex_cycle=tuple((c.polygon_id, c.vertex_index) for c in cycle.corners),
                total_angle=angle,
                prongs=prongs,
                location=cycle.location,
                singular=prongs != regular,
            )
        )
    return reports


def euler_characteristic(s: HalfTranslationSurface) -> int:
    """V - E + F of the identified cell complex."""
    edges = len(s.pairings) + sum(1 for e in s.edges() if s.is_boundary(e))
    return len(s.vertex_cycles) - edges + len(s.polygons)


def gauss_bonnet_global(s: HalfTranslationSurface) -> GaussBonnetReport:
    """
    Sum of cone curvatures against 2*pi*chi.

    Args:
        s: Closed surface, or one whose boundary is horizontal

    Returns:
        GaussBonnetReport: both sides and their residual

    Raises:
        PreconditionError: s has free boundary
    """
    if s.has_free_boundary:
        raise PreconditionError("Gauss-Bonnet balance needs a closed surface or horizontal boundary",
                                hypothesis="horizontal boundary")
    lhs = 0.0
    for cycle in s.vertex_cycles:
        if cycle.location == INTERIOR:
            lhs += 2 * math.pi - cycle.total_angle
        else:
            lhs += math.pi - cycle.total_angle
    chi = euler_characteristic(s)
    return GaussBonnetReport(lhs=lhs, chi=chi, residual=lhs - 2 * math.pi * chi)


def area(s: HalfTranslationSurface) -> float:
    return sum(p.signed_area for p in s.polygons)


def diameter_bound(s: HalfTranslationSurface) -> float:
    """Largest polygon diameter; a scale for mesh and tolerance choices."""
    best = 0.0
    for poly in s.polygons:
        for a in poly.vertices:
            for b in poly.vertices:
                best = max(best, abs(a - b))
    return best


# ----------------------------------------------------------------------
# Points
# ----------------------------------------------------------------------

def canonicalize_point(s: HalfTranslationSurface, point: SurfacePoint) -> SurfacePoint:
    """Move points on edges (or vertices) to the lowest representative."""
    corner = s.vertex_at(point)
    if corner is not None:
        ci = s.cycle_of(corner)
        lowest = min(s.vertex_cycles[ci].corners)
        return SurfacePoint(lowest.polygon_id, s.polygons[lowest.polygon_id].vertex(lowest.vertex_index))
    e = s.edge_at(point)
    if e is None or s.is_boundary(e):
        return point
    f, phi = s.gluing_map(e)
    if (f.polygon_id, f.edge_index) < (e.polygon_id, e.edge_index):
        return SurfacePoint(f.polygon_id, phi(point.position))
    return point


def boundary_components(s: HalfTranslationSurface) -> List[List[EdgeRef]]:
    """Boundary edges grouped into cycles, each ordered with the surface on the left."""

    def next_boundary_edge(e: EdgeRef) -> EdgeRef:
        n = s.polygons[e.polygon_id].n
        corner = Corner(e.polygon_id, (e.edge_index + 1) % n)
        for _ in range(sum(p.n for p in s.polygons) + 1):
            outgoing = EdgeRef(corner.polygon_id, corner.vertex_index)
            if s.is_boundary(outgoing):
                return outgoing
            corner = s.next_cw(corner)
        raise StructuralError(f"boundary walk from {e} does not terminate")

    remaining = sorted(e for e in s.edges() if s.is_boundary(e))
    used = set()
    components = []
    for start in remaining:
        if start in used:
            continue
        component = [start]
        used.add(start)
        current = next_boundary_edge(start)
        while current != start:
            component.append(current)
            used.add(current)
            current = next_boundary_edge(current)
        components.append(component)
    return components


# ----------------------------------------------------------------------
# Subdivision and relabelling
# ----------------------------------------------------------------------

def _unique_name(existing: Sequence[str], wanted: str) -> str:
    name, k = wanted, 1
    while name in existing:
        k += 1
        name = f"{wanted}_{k}"
    return name


def _relocate_marks(
    polygons: Sequence[Polygon], marks: Sequence[MarkedPoint], candidates: Dict[int, List[int]]
) -> List[MarkedPoint]:
    out = []
    for mark in marks:
        options = candidates.get(mark.point.polygon_id, [mark.point.polygon_id])
        target = next((pid for pid in options if polygons[pid].contains(mark.point.position)), options[0])
        out.append(MarkedPoint(SurfacePoint(target, mark.point.position), mark.role, mark.name))
    return out


def subdivide(s: HalfTranslationSurface, polygon_id: int, i: int, j: int) -> HalfTranslationSurface:
    """Cut a polygon along the diagonal v_i v_j; the two sides are glued by translation."""
    poly = s.polygons[polygon_id]
    n = poly.n
    i, j = sorted((i % n, j % n))
    if j - i < 2 or (i == 0 and j == n - 1):
        raise PreconditionError(f"vertices {i} and {j} of polygon {polygon_id} are adjacent", hypothesis="diagonal")

    first = Polygon(tuple(poly.vertex(k) for k in range(i, j + 1)), poly.name)
    second_vertices = tuple(poly.vertex(k) for k in list(range(j, n)) + list(range(0, i + 1)))
    names = [p.name for p in s.polygons]
    second = Polygon(second_vertices, _unique_name(names, f"{poly.name or polygon_id}_{i}_{j}"))
    for piece in (first, second):
        if piece.signed_area <= TOL or not LinearRing([(v.real, v.imag) for v in piece.vertices]).is_simple:
            raise PreconditionError(f"segment v{i} v{j} is not an interior diagonal", hypothesis="diagonal")
    if abs(first.signed_area + second.signed_area - poly.signed_area) > TOL * max(1.0, poly.signed_area):
        raise PreconditionError(f"segment v{i} v{j} leaves polygon {polygon_id}", hypothesis="diagonal")

    new_id = len(s.polygons)

    def remap(e: EdgeRef) -> EdgeRef:
        if e.polygon_id != polygon_id:
            return e
        if i <= e.edge_index < j:
            return EdgeRef(polygon_id, e.edge_index - i)
        return EdgeRef(new_id, (e.edge_index - j) % n)

    polygons = list(s.polygons)
    polygons[polygon_id] = first
    polygons.append(second)
    pairings = [Pairing(remap(p.a), remap(p.b), p.sign) for p in s.pairings]
    pairings.append(Pairing(EdgeRef(polygon_id, j - i), EdgeRef(new_id, second.n - 1), 1))
    boundary = [BoundaryEdge(remap(b.edge), b.kind) for b in s.boundary]
    marks = _relocate_marks(polygons, s.marked_points, {polygon_id: [polygon_id, new_id]})
    return HalfTranslationSurface(tuple(polygons), tuple(pairings), tuple(boundary), tuple(marks))


def relabel(s: HalfTranslationSurface, order: Sequence[int]) -> HalfTranslationSurface:
    """New polygon k is old polygon order[k]."""
    if sorted(order) != list(range(len(s.polygons))):
        raise PreconditionError("relabelling must be a permutation", hypothesis="permutation")
    new_of_old = {old: new for new, old in enumerate(order)}

    def remap(e: EdgeRef) -> EdgeRef:
        return EdgeRef(new_of_old[e.polygon_id], e.edge_index)

    return HalfTranslationSurface(
        tuple(s.polygons[old] for old in order),
        tuple(Pairing(remap(p.a), remap(p.b), p.sign) for p in s.pairings),
        tuple(BoundaryEdge(remap(b.edge), b.kind) for b in s.boundary),
        tuple(
            MarkedPoint(SurfacePoint(new_of_old[m.point.polygon_id], m.point.position), m.role, m.name)
            for m in s.marked_points
        ),
    )


def insert_edge_points(
    s: HalfTranslationSurface, cuts: Dict[EdgeRef, complex]
) -> Tuple[HalfTranslationSurface, Dict[EdgeRef, List[EdgeRef]]]:
    """Insert one new vertex on each listed edge; return the surface and old->new edge pieces.

    Every paired edge in ``cuts`` must have its partner cut at the glued point.
    """
    polygons = []
    pieces: Dict[EdgeRef, List[EdgeRef]] = {}
    for pid, poly in enumerate(s.polygons):
        vertices: List[complex] = []
        for i in range(poly.n):
            e = EdgeRef(pid, i)
            vertices.append(poly.vertex(i))
            start = len(vertices) - 1
            if e in cuts:
                vertices.append(cuts[e])
                pieces[e] = [EdgeRef(pid, start), EdgeRef(pid, start + 1)]
            else:
                pieces[e] = [EdgeRef(pid, start)]
        polygons.append(Polygon(tuple(vertices), poly.name))

    pairings = []
    for p in s.pairings:
        pa, pb = pieces[p.a], pieces[p.b]
        if len(pa) != len(pb):
            raise StructuralError(f"edges {p.a} and {p.b} were cut inconsistently")
        # start of a is glued to the end of b
        for x, y in zip(pa, reversed(pb)):
            pairings.append(Pairing(x, y, p.sign))
    boundary = [BoundaryEdge(piece, b.kind) for b in s.boundary for piece in pieces[b.edge]]
    out = HalfTranslationSurface(tuple(polygons), tuple(pairings), tuple(boundary), s.marked_points)
    return out, pieces


def split_edge(s: HalfTranslationSurface, e: EdgeRef, t: float) -> HalfTranslationSurface:
    """Insert a vertex at parameter t on e, and at the glued point on its partner."""
    if not 0.0 < t < 1.0:
        raise PreconditionError("split parameter must lie strictly inside the edge", hypothesis="0<t<1")
    e = s.normalize_edge(e)
    a0, a1 = s.edge_endpoints(e)
    cuts = {e: a0 + t * (a1 - a0)}
    if not s.is_boundary(e):
        f, phi = s.gluing_map(e)
        if f == e:
            raise StructuralError(f"edge {e} is glued to itself")
        cuts[f] = phi(cuts[e])
    return insert_edge_points(s, cuts)[0]


# ----------------------------------------------------------------------
# Triangulation (ear clipping, used internally by searches and meshes)
# ----------------------------------------------------------------------

def ear_clip(vertices: Sequence[complex]) -> List[Tuple[int, int, int]]:
    """Triangulate a simple CCW polygon; straight (angle pi) vertices are never ear tips."""
    n = len(vertices)
    scale = max(abs(a - b) for a in vertices for b in vertices) or 1.0
    remaining = list(range(n))
    triangles: List[Tuple[int, int, int]] = []
    while len(remaining) > 3:
        m = len(remaining)
        for t in range(m):
            a, b, c = remaining[t - 1], remaining[t], remaining[(t + 1) % m]
            A, B, C = vertices[a], vertices[b], vertices[c]
            if cross(B - A, C - B) <= TOL * scale:
                continue
            blocked = any(
                in_closed_triangle(vertices[o], A, B, C)
                for o in remaining
                if o not in (a, b, c) and all(abs(vertices[o] - w) > TOL for w in (A, B, C))
            )
            if blocked:
                continue
            triangles.append((a, b, c))
            remaining.pop(t)
            break
        else:
            raise StructuralError("polygon admits no ear; it is not simple")
    a, b, c = remaining
    if cross(vertices[b] - vertices[a], vertices[c] - vertices[b]) <= TOL * scale:
        raise StructuralError("ear clipping produced a degenerate triangle")
    triangles.append((a, b, c))
    return triangles


@dataclass(frozen=True)
class Triangulation:
    """A triangulated copy of a surface with the bookkeeping back to the original."""

    surface: HalfTranslationSurface
    original: HalfTranslationSurface
    parent_polygon: Tuple[int, ...]
    parent_vertices: Tuple[Tuple[int, int, int], ...]
    parent_edge: Tuple[Tuple[Optional[EdgeRef], ...], ...]
    child_edge: Dict[EdgeRef, EdgeRef]

    def triangles_of(self, polygon_id: int) -> List[int]:
        return [t for t, p in enumerate(self.parent_polygon) if p == polygon_id]

    def locate(self, point: SurfacePoint) -> List[int]:
        """Triangles (of the parent polygon) whose closure contains the point."""
        found = []
        for t in self.triangles_of(point.polygon_id):
            tri = self.surface.polygons[t]
            if in_closed_triangle(point.position, *tri.vertices):
                found.append(t)
        if not found:
            raise PreconditionError(f"point {point} is outside its polygon", hypothesis="point on surface")
        return found

    def original_corner(self, triangle: int, local_vertex: int) -> Corner:
        return Corner(self.parent_polygon[triangle], self.parent_vertices[triangle][local_vertex % 3])


def triangulate(s: HalfTranslationSurface) -> Triangulation:
    polygons: List[Polygon] = []
    parent_polygon: List[int] = []
    parent_vertices: List[Tuple[int, int, int]] = []
    parent_edge: List[Tuple[Optional[EdgeRef], ...]] = []
    child_edge: Dict[EdgeRef, EdgeRef] = {}
    diagonals: Dict[Tuple[int, int, int], List[EdgeRef]] = {}

    for pid, poly in enumerate(s.polygons):
        for k, (a, b, c) in enumerate(ear_clip(poly.vertices)):
            tid = len(polygons)
            polygons.append(Polygon((poly.vertex(a), poly.vertex(b), poly.vertex(c)), f"{poly.name or pid}:{k}"))
            parent_polygon.append(pid)
            parent_vertices.append((a, b, c))
            edges: List[Optional[EdgeRef]] = []
            for local, (u, v) in enumerate(((a, b), (b, c), (c, a))):
                if (v - u) % poly.n == 1:
                    original = EdgeRef(pid, u)
                    child_edge[original] = EdgeRef(tid, local)
                    edges.append(original)
                else:
                    diagonals.setdefault((pid, min(u, v), max(u, v)), []).append(EdgeRef(tid, local))
                    edges.append(None)
            parent_edge.append(tuple(edges))

    pairings = [Pairing(child_edge[p.a], child_edge[p.b], p.sign) for p in s.pairings]
    for key in sorted(diagonals):
        sides = diagonals[key]
        if len(sides) != 2:
            raise StructuralError(f"diagonal {key} has {len(sides)} sides")
        pairings.append(Pairing(sides[0], sides[1], 1))
    boundary = [BoundaryEdge(child_edge[b.edge], b.kind) for b in s.boundary]

    candidates: Dict[int, List[int]] = {}
    for tid, pid in enumerate(parent_polygon):
        candidates.setdefault(pid, []).append(tid)
    marks = _relocate_marks(polygons, s.marked_points, candidates)

    surface = HalfTranslationSurface(tuple(polygons), tuple(pairings), tuple(boundary), tuple(marks))
    logger.debug("triangulated %d polygons into %d triangles", len(s.polygons), len(polygons))
    return Triangulation(
        surface=surface,
        original=s,
        parent_polygon=tuple(parent_polygon),
        parent_vertices=tuple(parent_vertices),
        parent_edge=tuple(parent_edge),
        child_edge=child_edge,
    )


def refine_triangles(s: HalfTranslationSurface, divisions: int) -> HalfTranslationSurface:
    """Split every triangle of an all-triangle surface into divisions**2 congruent triangles.

    Sub-edges of a glued edge are glued to the matching sub-edges of its partner.
    """
    if divisions < 1:
        raise PreconditionError("divisions must be at least 1", hypothesis="divisions>=1")
    if any(p.n != 3 for p in s.polygons):
        raise PreconditionError("refinement expects a triangulated surface", hypothesis="triangles")
    m = divisions
    polygons: List[Polygon] = []
    internal: Dict[Tuple[int, Tuple[int, int], Tuple[int, int]], List[EdgeRef]] = {}
    rim: Dict[Tuple[int, int, int], EdgeRef] = {}  # (triangle, original edge, segment index) -> small edge

    def lattice(a: complex, b: complex, c: complex, i: int, j: int) -> complex:
        return a + (b - a) * (i / m) + (c - a) * (j / m)

    def rim_slot(i: int, j: int, i2: int, j2: int) -> Optional[Tuple[int, int]]:
        # original edge 0: j == 0 (a->b), edge 1: i + j == m (b->c), edge 2: i == 0 (c->a)
        if j == 0 and j2 == 0:
            return 0, min(i, i2)
        if i + j == m and i2 + j2 == m:
            return 1, min(j, j2)
        if i == 0 and i2 == 0:
            return 2, m - 1 - min(j, j2)
        return None

    for tid, tri in enumerate(s.polygons):
        a, b, c = tri.vertices
        small = []
        for i in range(m):
            for j in range(m - i):
                small.append(((i, j), (i + 1, j), (i, j + 1)))
                if i + j < m - 1:
                    small.append(((i + 1, j), (i + 1, j + 1), (i, j + 1)))
        for corners in small:
            sid = len(polygons)
            polygons.append(Polygon(tuple(lattice(a, b, c, *ij) for ij in corners), f"{tri.name or tid}.{len(polygons)}"))
            for local in range(3):
                (i, j), (i2, j2) = corners[local], corners[(local + 1) % 3]
                slot = rim_slot(i, j, i2, j2)
                if slot is not None:
                    rim[(tid, slot[0], slot[1])] = EdgeRef(sid, local)
                else:
                    key = (tid,) + tuple(sorted(((i, j), (i2, j2))))
                    internal.setdefault(key, []).append(EdgeRef(sid, local))

    pairings = []
    for key in sorted(internal):
        x, y = internal[key]
        pairings.append(Pairing(x, y, 1))
    for p in s.pairings:
        for k in range(m):
            # segment k along a (from its start) meets segment m-1-k along b
            pairings.append(Pairing(rim[(p.a.polygon_id, p.a.edge_index, k)],
                                    rim[(p.b.polygon_id, p.b.edge_index, m - 1 - k)], p.sign))
    boundary = [
        BoundaryEdge(rim[(b.edge.polygon_id, b.edge.edge_index, k)], b.kind)
        for b in s.boundary
        for k in range(m)
    ]
    candidates = {}
    per_triangle = len(polygons) // max(1, len(s.polygons))
    for tid in range(len(s.polygons)):
        candidates[tid] = list(range(tid * per_triangle, (tid + 1) * per_triangle))
    marks = _relocate_marks(polygons, s.marked_points, candidates)
    return HalfTranslationSurface(tuple(polygons), tuple(pairings), tuple(boundary), tuple(marks))
