"""
Surgery on half-translation surfaces
Location: geometry/surgery.py

Horizontal slits, unfolding of slit tips, gluing flat cylinders onto
horizontal boundary (the enlargement X_r), branched double covers and the
horizontal flow family on slit cylinders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import sympy
from shapely.geometry import LineString, Point

from config import CLI_CONFIG, SURGERY_CONFIG, TOLERANCE_CONFIG
from geometry.errors import CollisionError, PreconditionError
from geometry.qc_maps import EmbeddingReport, PiecewiseAffineMap, dilatation_of, inclusion_map, teichmuller_embedding_check, translation_map
from geometry.surface_core import (
    BOUNDARY,
    HORIZONTAL,
    PUNCTURE,
    BoundaryEdge,
    Corner,
    EdgeRef,
    HalfTranslationSurface,
    MarkedPoint,
    Pairing,
    Polygon,
    SurfacePoint,
    area,
    boundary_components,
    euler_characteristic,
    gauss_bonnet_global,
    insert_edge_points,
    point_segment_distance,
    require_valid,
    split_edge,
    subdivide,
)
from utils.logger import get_logger

logger = get_logger(__name__)

TOL = TOLERANCE_CONFIG["exact"]


# ============= SLITS =============

@dataclass(frozen=True)
class SlitSpec:
    start: SurfacePoint
    length: float
    direction: int = 1  # +1 runs toward larger x, -1 toward smaller x


@dataclass(frozen=True)
class SlitTip:
    cycle: int
    point: SurfacePoint
    prongs: int


@dataclass(frozen=True)
class UnfoldReport:
    tip: SurfacePoint
    cycle: int
    original_prongs: int
    unfolded_prongs: int
    zero_order: int
    pullback: str
    pullback_ok: bool

    def to_dict(self) -> Dict:
        return {
            "tip": [self.tip.polygon_id, self.tip.position.real, self.tip.position.imag],
            "cycle": self.cycle,
            "original_prongs": self.original_prongs,
            "unfolded_prongs": self.unfolded_prongs,
            "zero_order": self.zero_order,
            "pullback": self.pullback,
            "pullback_ok": self.pullback_ok,
        }


def _vertex_index(poly: Polygon, z: complex) -> Optional[int]:
    for k, v in enumerate(poly.vertices):
        if abs(v - z) <= TOL:
            return k
    return None


def _chord(shape, y: float, through: complex) -> Tuple[complex, complex]:
    """Horizontal segment of the polygon at height y through the given point."""
    minx, _, maxx, _ = shape.bounds
    line = LineString([(minx - 1.0, y), (maxx + 1.0, y)])
    hit = shape.intersection(line)
    parts = getattr(hit, "geoms", [hit])
    for part in parts:
        if part.geom_type == "LineString" and part.distance(Point(through.real, through.imag)) <= TOL:
            xs = [x for x, _ in part.coords]
            return complex(min(xs), y), complex(max(xs), y)
    raise PreconditionError("slit must lie inside one polygon", hypothesis="slit inside surface")


def _on_segment(z: complex, left: complex, right: complex) -> bool:
    return abs(z.imag - left.imag) <= TOL and left.real - TOL <= z.real <= right.real + TOL


def cut_slit(s: HalfTranslationSurface, slit: SlitSpec) -> HalfTranslationSurface:
    """Remove a horizontal slit; its two sides become horizontal boundary edges."""
    if slit.length <= TOL:
        raise PreconditionError("slit length must be positive", hypothesis="length>0")
    if slit.direction not in (1, -1):
        raise PreconditionError("slit direction must be +1 or -1", hypothesis="horizontal slit")
    pid = slit.start.polygon_id
    a = slit.start.position
    b = a + slit.direction * slit.length
    left, right = (a, b) if a.real <= b.real else (b, a)
    poly = s.polygons[pid]

    for v in poly.vertices:
        if point_segment_distance(v, left, right) <= TOL and abs(v - left) > TOL and abs(v - right) > TOL:
            raise PreconditionError(f"slit passes through the cone point at {v}", hypothesis="slit avoids cone points")
    segment = LineString([(left.real, left.imag), (right.real, right.imag)])
    for i in range(poly.n):
        if s.is_boundary(EdgeRef(pid, i)):
            p, q = poly.edge_endpoints(i)
            if segment.distance(LineString([(p.real, p.imag), (q.real, q.imag)])) <= TOL:
                raise PreconditionError("slit touches existing boundary", hypothesis="slit avoids boundary")
    shape = poly.to_shapely()
    middle = 0.5 * (left + right)
    if not shape.buffer(TOL).covers(segment) or not shape.contains(Point(middle.real, middle.imag)):
        raise PreconditionError("slit must lie inside one polygon", hypothesis="slit inside surface")

    chord_left, chord_right = _chord(shape, left.imag, middle)
    surface = s
    for z in (chord_left, chord_right):
        current = surface.polygons[pid]
        if _vertex_index(current, z) is not None:
            continue
        for i in range(current.n):
            p, q = current.edge_endpoints(i)
            if point_segment_distance(z, p, q) <= TOL:
                surface = split_edge(surface, EdgeRef(pid, i), abs(z - p) / abs(q - p))
                break
    current = surface.polygons[pid]
    surface = subdivide(surface, pid, _vertex_index(current, chord_left), _vertex_index(current, chord_right))
    halves = (pid, len(surface.polygons) - 1)

    for z in (left, right):
        if _vertex_index(surface.polygons[pid], z) is not None:
            continue
        cuts = {}
        for i in range(surface.polygons[pid].n):
            e = EdgeRef(pid, i)
            p, q = surface.edge_endpoints(e)
            found = surface.partner(e)
            if found and found[0].polygon_id in halves and point_segment_distance(z, p, q) <= TOL:
                f, phi = surface.gluing_map(e)
                cuts = {e: z, f: phi(z)}
                break
        surface, _ = insert_edge_points(surface, cuts)

    def on_slit(e: EdgeRef) -> bool:
        return e.polygon_id in halves and all(_on_segment(z, left, right) for z in surface.edge_endpoints(e))

    pairings, boundary = [], list(surface.boundary)
    for p in surface.pairings:
        if on_slit(p.a) and on_slit(p.b):
            boundary += [BoundaryEdge(p.a, HORIZONTAL), BoundaryEdge(p.b, HORIZONTAL)]
        else:
            pairings.append(p)
    out = HalfTranslationSurface(surface.polygons, tuple(pairings), tuple(boundary), surface.marked_points)
    require_valid(out)
    logger.debug("cut slit of length %s from %s", slit.length, slit.start)
    return out


def slit_boundary_tips(s: HalfTranslationSurface) -> List[SlitTip]:
    """Horizontal boundary vertices whose angle is at least 2pi: where a slit ends."""
    tips = []
    for ci, cycle in enumerate(s.vertex_cycles):
        if cycle.location != BOUNDARY or not s.cycle_is_horizontal(cycle):
            continue
        if cycle.total_angle >= 2 * math.pi - TOL:
            corner = cycle.corners[0]
            point = SurfacePoint(corner.polygon_id, s.polygons[corner.polygon_id].vertex(corner.vertex_index))
            tips.append(SlitTip(ci, point, round(cycle.total_angle / math.pi)))
    return tips


def pullback_under_square() -> sympy.Expr:
    """Coefficient of dw^2 after substituting z = w^2 into dz^2."""
    w = sympy.symbols("w")
    return sympy.expand(sympy.diff(w ** 2, w) ** 2)


def unfold_slit(s: HalfTranslationSurface, tip: SurfacePoint) -> UnfoldReport:
    """An n-prong tip unfolds to half of a 2n-prong singularity, a zero of order 2n - 2."""
    corner = s.vertex_at(tip)
    if corner is None:
        raise PreconditionError(f"{tip} is not a vertex", hypothesis="slit endpoint")
    ci = s.cycle_of(corner)
    match = next((t for t in slit_boundary_tips(s) if t.cycle == ci), None)
    if match is None:
        raise PreconditionError(f"{tip} is not a slit endpoint", hypothesis="slit endpoint")
    n = match.prongs
    pullback = pullback_under_square()
    w = sympy.symbols("w")
    return UnfoldReport(tip, ci, n, 2 * n, 2 * n - 2, str(pullback), sympy.simplify(pullback - 4 * w ** 2) == 0)


# ============= ENLARGEMENT =============

@dataclass(frozen=True)
class EnlargementSpec:
    r: float


def _pairing_sign(va: complex, vb: complex) -> int:
    return 1 if abs(va + vb) <= TOL * max(1.0, abs(va)) else -1


def glue_cylinders(s: HalfTranslationSurface, spec: EnlargementSpec) -> HalfTranslationSurface:
    """Attach a flat cylinder of modulus r to every boundary circle."""
    if spec.r < 0:
        raise PreconditionError("r must be non-negative", hypothesis="r>=0")
    if any(s.boundary_kind(e) != HORIZONTAL for e in s.edges() if s.is_boundary(e)):
        raise PreconditionError("enlargement needs horizontal boundary", hypothesis="horizontal boundary")
    if spec.r == 0:
        return s
    for cycle in s.vertex_cycles:
        if cycle.location == BOUNDARY and abs(cycle.total_angle - math.pi) > TOL:
            raise PreconditionError(
                "boundary is not circle-developable (boundary vertex of angle "
                f"{cycle.total_angle / math.pi:.6g} pi)",
                hypothesis="circle boundary",
            )

    polygons = list(s.polygons)
    pairings = list(s.pairings)
    boundary: List[BoundaryEdge] = []
    for component in boundary_components(s):
        height = spec.r * sum(abs(s.edge_vector(e)) for e in component)
        collar: List[int] = []
        for e in component:
            p0, p1 = s.edge_endpoints(e)
            outward = -1j * (p1 - p0) / abs(p1 - p0) * height
            rid = len(polygons)
            name = f"{s.polygons[e.polygon_id].name or e.polygon_id}+{e.edge_index}"
            polygons.append(Polygon((p1, p0, p0 + outward, p1 + outward), name))
            pairings.append(Pairing(e, EdgeRef(rid, 0), 1))
            boundary.append(BoundaryEdge(EdgeRef(rid, 2), HORIZONTAL))
            collar.append(rid)
        for k, rid in enumerate(collar):
            nxt = collar[(k + 1) % len(collar)]
            ours, theirs = EdgeRef(rid, 3), EdgeRef(nxt, 1)
            va = polygons[rid].edge_vector(3)
            vb = polygons[nxt].edge_vector(1)
            pairings.append(Pairing(ours, theirs, _pairing_sign(va, vb)))
    out = HalfTranslationSurface(tuple(polygons), tuple(pairings), tuple(boundary), s.marked_points)
    require_valid(out)
    return out


def modulus_of_extension_cylinder(hX: float, hY: float) -> float:
    """Largest r with C(hX)_r embedding in C(hY), both of circumference 1."""
    if hX <= 0 or hY <= 0:
        raise PreconditionError("cylinder heights must be positive", hypothesis="heights>0")
    if hX > hY:
        raise PreconditionError(f"C({hX}) does not embed in C({hY})", hypothesis="hX<=hY")
    return (hY - hX) / 2


@dataclass(frozen=True)
class ExtensionSearchReport:
    r: float
    expected: float
    iterations: int
    tolerance: float

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def cylinder_modulus(s: HalfTranslationSurface) -> float:
    """Height over circumference of a flat cylinder, measured as area / circumference^2."""
    components = boundary_components(s)
    if len(components) != 2:
        raise PreconditionError("a flat cylinder has two boundary circles", hypothesis="cylinder")
    circumference = sum(abs(s.edge_vector(e)) for e in components[0])
    return area(s) / circumference ** 2


def extension_search(hX: float, hY: float, tolerance: Optional[float] = None) -> ExtensionSearchReport:
    """
    Largest r with C(hX)_r inside C(hY), found by bisection on the measured modulus.

    Args:
        hX: Height of the inner cylinder
        hY: Height of the outer cylinder
        tolerance: Bracket width at which the bisection stops

    Returns:
        ExtensionSearchReport: the searched r next to the closed form (hY - hX) / 2
    """
    from geometry.corpus import cylinder

    tolerance = tolerance or SURGERY_CONFIG["extension_search_tolerance"]
    expected = modulus_of_extension_cylinder(hX, hY)
    base = cylinder(hX)
    lo, hi, iterations = 0.0, hY, 0
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if cylinder_modulus(glue_cylinders(base, EnlargementSpec(mid))) <= hY + TOL:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return ExtensionSearchReport(lo, expected, iterations, tolerance)


# ============= DOUBLE COVERS =============

@dataclass(frozen=True)
class CoverSpec:
    """Branch points name marked punctures; arcs and loops are edge paths."""

    branch_points: Tuple[str, ...] = ()
    cut_arcs: Tuple[Tuple[EdgeRef, ...], ...] = ()
    cut_loops: Tuple[Tuple[EdgeRef, ...], ...] = ()


@dataclass(frozen=True)
class CoverReport:
    degree: int
    chi_base: int
    chi_cover: int
    expected_chi: int
    riemann_hurwitz: bool
    gauss_bonnet_residual: float
    branch_local_degrees: Tuple[int, ...]
    deck_fixed_points: Tuple[int, ...]
    deck_involution_ok: bool

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def _path_vertices(s: HalfTranslationSurface, path: Sequence[EdgeRef]) -> List[int]:
    """Vertex cycles visited by a connected edge path, whichever way each edge is walked."""
    if not path:
        raise PreconditionError("cut paths need at least one edge", hypothesis="cut path")
    first = s.edge_cycles(path[0])
    if len(path) == 1:
        return list(first)
    nxt = set(s.edge_cycles(path[1]))
    start, end = (first[0], first[1]) if first[1] in nxt else (first[1], first[0])
    if end not in nxt:
        raise PreconditionError("cut path is not connected", hypothesis="cut path")
    visited = [start, end]
    for e in path[1:]:
        u, v = s.edge_cycles(e)
        if u == visited[-1]:
            visited.append(v)
        elif v == visited[-1]:
            visited.append(u)
        else:
            raise PreconditionError("cut path is not connected", hypothesis="cut path")
    return visited


def double_cover_branched(s: HalfTranslationSurface, spec: CoverSpec) -> Tuple[HalfTranslationSurface, CoverReport]:
    """
    Two sheets of s, swapped across every cut arc and loop.

    Args:
        s: Base surface; branch points must be marked punctures on it
        spec: Branch points paired by cut arcs, plus unbranched cut loops

    Returns:
        Tuple: the cover and a CoverReport checking Riemann-Hurwitz, Gauss-Bonnet
        and the deck involution

    Raises:
        PreconditionError: odd branch set, unknown puncture or a broken cut path
    """
    if len(spec.branch_points) % 2:
        raise PreconditionError("branch points must come in pairs", hypothesis="even branch set")
    if len(spec.cut_arcs) * 2 != len(spec.branch_points):
        raise PreconditionError("one cut arc per pair of branch points", hypothesis="arc pairing")
    marks = {m.name: m for m in s.marked_points if m.role == PUNCTURE}
    branch_cycles = []
    for name in spec.branch_points:
        if name not in marks:
            raise PreconditionError(f"unknown branch point {name!r}", hypothesis="marked puncture")
        corner = s.vertex_at(marks[name].point)
        if corner is None:
            raise PreconditionError(f"branch point {name!r} is not a polygon vertex", hypothesis="vertex branch point")
        branch_cycles.append(s.cycle_of(corner))

    cut: Set[EdgeRef] = set()
    used_vertices: Set[int] = set()
    for k, arc in enumerate(spec.cut_arcs):
        visited = _path_vertices(s, arc)
        ends = {visited[0], visited[-1]}
        if ends != {branch_cycles[2 * k], branch_cycles[2 * k + 1]}:
            raise PreconditionError(f"arc {k} does not join its branch points", hypothesis="arc pairing")
        if used_vertices & set(visited) or len(set(visited)) != len(visited):
            raise PreconditionError("cut arcs intersect", hypothesis="disjoint arcs")
        used_vertices |= set(visited)
        cut |= _cut_edges(s, arc)
    for loop in spec.cut_loops:
        visited = _path_vertices(s, loop)
        if visited[0] != visited[-1]:
            raise PreconditionError("cut loop does not close", hypothesis="closed loop")
        if used_vertices & set(visited):
            raise PreconditionError("cut loop meets another cut", hypothesis="disjoint arcs")
        used_vertices |= set(visited)
        cut |= _cut_edges(s, loop)

    N = len(s.polygons)
    polygons = [Polygon(p.vertices, f"{p.name or k}.{sheet}") for sheet in (0, 1) for k, p in enumerate(s.polygons)]

    def lift(e: EdgeRef, sheet: int) -> EdgeRef:
        return EdgeRef(e.polygon_id + sheet * N, e.edge_index)

    pairings = []
    for p in s.pairings:
        swap = p.a in cut or p.b in cut
        for sheet in (0, 1):
            pairings.append(Pairing(lift(p.a, sheet), lift(p.b, 1 - sheet if swap else sheet), p.sign))
    boundary = [BoundaryEdge(lift(b.edge, sheet), b.kind) for sheet in (0, 1) for b in s.boundary]
    marks_out = [
        MarkedPoint(SurfacePoint(m.point.polygon_id + sheet * N, m.point.position), m.role, f"{m.name}.{sheet}" if m.name else "")
        for sheet in (0, 1)
        for m in s.marked_points
        if m.name not in spec.branch_points
    ]
    W = HalfTranslationSurface(tuple(polygons), tuple(pairings), tuple(boundary), tuple(marks_out))
    require_valid(W)

    def deck(corner: Corner) -> Corner:
        return Corner((corner.polygon_id + N) % (2 * N), corner.vertex_index)

    fixed = []
    for ci, cycle in enumerate(W.vertex_cycles):
        if W.cycle_of(deck(cycle.corners[0])) == ci:
            fixed.append(ci)
    over_branch = {W.cycle_of(Corner(c.polygon_id, c.vertex_index)) for bc in branch_cycles for c in s.vertex_cycles[bc].corners}
    local = tuple(
        2 if W.cycle_of(Corner(s.vertex_cycles[bc].corners[0].polygon_id, s.vertex_cycles[bc].corners[0].vertex_index))
        == W.cycle_of(deck(s.vertex_cycles[bc].corners[0]))
        else 1
        for bc in branch_cycles
    )
    pairing_set = {(p.a, p.b) for p in W.pairings} | {(p.b, p.a) for p in W.pairings}
    swapped_ok = all(
        (EdgeRef((p.a.polygon_id + N) % (2 * N), p.a.edge_index), EdgeRef((p.b.polygon_id + N) % (2 * N), p.b.edge_index))
        in pairing_set
        for p in W.pairings
    )
    chi_base, chi_cover = euler_characteristic(s), euler_characteristic(W)
    expected = 2 * chi_base - len(spec.branch_points)
    report = CoverReport(
        degree=len(W.polygons) // N,
        chi_base=chi_base,
        chi_cover=chi_cover,
        expected_chi=expected,
        riemann_hurwitz=chi_cover == expected,
        gauss_bonnet_residual=gauss_bonnet_global(W).residual,
        branch_local_degrees=local,
        deck_fixed_points=tuple(fixed),
        deck_involution_ok=swapped_ok and set(fixed) <= over_branch,
    )
    logger.debug("double cover: chi %d -> %d, %d branch points", chi_base, chi_cover, len(spec.branch_points))
    return W, report


def _cut_edges(s: HalfTranslationSurface, path: Sequence[EdgeRef]) -> Set[EdgeRef]:
    out = set()
    for e in path:
        e = s.normalize_edge(e)
        found = s.partner(e)
        if found is None:
            raise PreconditionError(f"cut edge {e} lies on the boundary", hypothesis="interior cut")
        out |= {e, found[0]}
    return out


# ============= HORIZONTAL FLOW =============

@dataclass(frozen=True)
class Slit:
    height: float
    x0: float
    x1: float


@dataclass(frozen=True)
class FlowClearance:
    clearance: float
    tip: str
    slits: Tuple[Slit, ...]


@dataclass
class FlowReport:
    t: float
    passed: bool
    injective: bool
    conformal: bool
    horizontal_complement: bool
    flow_lengths_constant: bool
    dilatation: float
    clearance: float
    embedding: EmbeddingReport
    sampled_lengths: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "t": self.t,
            "passed": self.passed,
            "injective": self.injective,
            "conformal": self.conformal,
            "horizontal_complement": self.horizontal_complement,
            "flow_lengths_constant": self.flow_lengths_constant,
            "dilatation": self.dilatation,
            "clearance": self.clearance,
            "embedding": self.embedding.to_dict(),
            "sampled_lengths": self.sampled_lengths,
        }


def _cylinder_circumference(Y: HalfTranslationSurface) -> float:
    if len(Y.polygons) != 1 or Y.polygons[0].n != 4 or len(boundary_components(Y)) != 2:
        raise PreconditionError("the flow codomain must be a flat cylinder", hypothesis="cylinder codomain")
    return abs(Y.polygons[0].edge_vector(0))


def _slits(X: HalfTranslationSurface) -> List[Slit]:
    tip_cycles = {t.cycle for t in slit_boundary_tips(X)}
    slits = []
    for component in boundary_components(X):
        cycles = {c for e in component for c in X.edge_cycles(e)}
        if not cycles & tip_cycles:
            continue
        points = [z for e in component for z in X.edge_endpoints(e)]
        slits.append(Slit(points[0].imag, min(z.real for z in points), max(z.real for z in points)))
    return sorted(slits, key=lambda sl: (sl.height, sl.x0))


def flow_clearance(X: HalfTranslationSurface, Y: HalfTranslationSurface) -> FlowClearance:
    """Smallest forward horizontal distance from a slit's front tip to an obstruction on its circle."""
    width = _cylinder_circumference(Y)
    slits = _slits(X)
    punctures = [m.point.position for m in X.marked_points if m.role == PUNCTURE]
    best, tip = math.inf, ""
    for k, sl in enumerate(slits):
        candidates = [(width - (sl.x1 - sl.x0), f"slit {k} back tip")]
        for j, other in enumerate(slits):
            if j != k and abs(other.height - sl.height) <= TOL:
                candidates.append(((other.x0 - sl.x1) % width, f"slit {j} back tip"))
        for z in punctures:
            if abs(z.imag - sl.height) <= TOL:
                candidates.append(((z.real - sl.x1) % width, f"puncture at {z}"))
        for distance, obstacle in candidates:
            if distance < best:
                best, tip = distance, f"slit {k} front tip reaches {obstacle}"
    return FlowClearance(best, tip, tuple(slits))


def flow_map(X: HalfTranslationSurface, Y: HalfTranslationSurface, t: float) -> PiecewiseAffineMap:
    return translation_map(X, Y, complex(t, 0.0), inclusion_map(X, Y).face_map)


def _sample_points(X: HalfTranslationSurface, count: int, rng: np.random.Generator) -> List[SurfacePoint]:
    points = []
    weights = np.array([p.signed_area for p in X.polygons])
    for pid in rng.choice(len(X.polygons), size=count, p=weights / weights.sum()):
        poly = X.polygons[pid]
        minx, miny, maxx, maxy = poly.to_shapely().bounds
        while True:
            z = complex(rng.uniform(minx, maxx), rng.uniform(miny, maxy))
            if poly.contains(z):
                points.append(SurfacePoint(int(pid), z))
                break
    return points


def horizontal_flow_family(
    X: HalfTranslationSurface, Y: HalfTranslationSurface, t: float, rng: Optional[np.random.Generator] = None
) -> Tuple[PiecewiseAffineMap, FlowReport]:
    """
    Time-t horizontal flow of a slit cylinder X inside the cylinder Y.

    Args:
        X: Slit cylinder being moved
        Y: Cylinder it sits in
        t: Flow time, below the clearance to the first collision
        rng: Source of the sample points for flow lengths; seeded from CLI_CONFIG when None

    Returns:
        Tuple: the flow map and its FlowReport

    Raises:
        CollisionError: a slit tip reaches the boundary of Y by time t
    """
    if t < 0:
        raise PreconditionError("flow time must be non-negative", hypothesis="t>=0")
    clearance = flow_clearance(X, Y)
    if t >= clearance.clearance - TOL:
        raise CollisionError(
            f"t={t} reaches the first collision at {clearance.clearance:.12g}: {clearance.tip}",
            tip=clearance.tip,
            clearance=clearance.clearance,
        )
    m = flow_map(X, Y, t)
    embedding = teichmuller_embedding_check(m, 1.0)
    K = dilatation_of(m)
    rng = rng or np.random.default_rng(CLI_CONFIG["default_seed"])
    lengths = [abs(m.apply(p.polygon_id, p.position) - p.position) for p in _sample_points(X, SURGERY_CONFIG["flow_sample_points"], rng)]
    constant = all(abs(length - t) <= TOL for length in lengths)
    report = FlowReport(
        t=t,
        passed=embedding.passed and abs(K - 1) <= TOL and constant,
        injective=embedding.overlap_area <= embedding.tolerance and embedding.escaped_area <= embedding.tolerance,
        conformal=abs(K - 1) <= TOL,
        horizontal_complement=embedding.horizontal,
        flow_lengths_constant=constant,
        dilatation=K,
        clearance=clearance.clearance,
        embedding=embedding,
        sampled_lengths=lengths,
    )
    return m, report
