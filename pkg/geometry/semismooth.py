"""
Semi-Smooth Sets - normal cones, local charts and curve-sequence convergence
Location: geometry/semismooth.py

A closed set is semi-smooth when every boundary point carries a non-empty
cone of normal directions with total angle below π, and limits of normals are
normal. At polygon resolution this becomes a per-vertex check. The second
half of the module handles sequences of closed curves: Hausdorff distance on
a window, collapsing-finger detection and uniform reparametrization by
winding number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import shapely
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from shapely import affinity
from shapely.geometry import LineString, Point, box
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.polygon import orient
from shapely.ops import unary_union

from config import SEMISMOOTH_CONFIG, TOLERANCE_CONFIG
from geometry.errors import PreconditionError, StructuralError
from utils.logger import get_logger

logger = get_logger("semismooth")

TWO_PI = 2 * math.pi
TOL = TOLERANCE_CONFIG["exact"]
CONE_TOL = SEMISMOOTH_CONFIG["cone_match_tolerance"]


def _as_complex(points) -> np.ndarray:
    arr = np.asarray(points)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    return arr.astype(complex)


def _signed_area(loop: Sequence[complex]) -> float:
    z = np.asarray(loop, dtype=complex)
    w = np.roll(z, -1)
    return 0.5 * float(np.sum(z.real * w.imag - w.real * z.imag))


def _angle(z: complex) -> float:
    return math.atan2(z.imag, z.real) % TWO_PI


# ============= PLANAR SETS =============

@dataclass(frozen=True)
class PlanarSet:
    """Closed polygonal region; zero-width notches may stand for slits.

    Loops are stored with the region on their left: outer CCW, holes CW.
    """

    outer: Tuple[complex, ...]
    holes: Tuple[Tuple[complex, ...], ...] = ()
    approximated: bool = False

    def __post_init__(self):
        outer = tuple(complex(z) for z in self.outer)
        if _signed_area(outer) < 0:
            outer = outer[::-1]
        holes = []
        for hole in self.holes:
            hole = tuple(complex(z) for z in hole)
            holes.append(hole[::-1] if _signed_area(hole) > 0 else hole)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", tuple(holes))
        for name, loop in self.named_loops():
            if len(loop) < 3:
                raise StructuralError(f"loop {name} needs at least 3 vertices")
            for k, z in enumerate(loop):
                if abs(loop[(k + 1) % len(loop)] - z) <= TOL:
                    raise StructuralError(f"loop {name} has a zero-length edge at vertex {k}")

    def named_loops(self) -> List[Tuple[str, Tuple[complex, ...]]]:
        return [("outer", self.outer)] + [(f"hole{i}", h) for i, h in enumerate(self.holes)]

    def to_shapely(self):
        poly = ShapelyPolygon(
            [(z.real, z.imag) for z in self.outer],
            [[(z.real, z.imag) for z in h] for h in self.holes],
        )
        return poly if poly.is_valid else shapely.make_valid(poly)

    def boundary_segments(self) -> List[Tuple[str, int, complex, complex]]:
        out = []
        for name, loop in self.named_loops():
            n = len(loop)
            out.extend((name, k, loop[k], loop[(k + 1) % n]) for k in range(n))
        return out

    def diameter(self) -> float:
        pts = np.array(self.outer)
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))


@dataclass(frozen=True)
class NormalCone:
    """Directions [theta1, theta2] (radians, counterclockwise) normal to the set at `base`."""

    base: complex
    theta1: float = 0.0
    theta2: float = 0.0
    empty: bool = False
    feature: str = ""

    @property
    def total_angle(self) -> float:
        return 0.0 if self.empty else self.theta2 - self.theta1

    @property
    def is_ray(self) -> bool:
        return not self.empty and self.total_angle <= CONE_TOL

    def bisector(self) -> float:
        if self.empty:
            raise PreconditionError(f"empty normal cone at {self.feature}", hypothesis="non-empty cone")
        return self.theta1 + 0.5 * self.total_angle

    def contains_direction(self, theta: float) -> bool:
        if self.empty:
            return False
        return ((theta - self.theta1) % TWO_PI) <= self.total_angle + CONE_TOL

    def to_dict(self) -> Dict:
        return {
            "feature": self.feature,
            "base": [self.base.real, self.base.imag],
            "theta1": self.theta1,
            "theta2": self.theta2,
            "total_angle": self.total_angle,
            "empty": self.empty,
        }


def _edge_normal(a: complex, b: complex) -> float:
    return _angle(-1j * (b - a))


def _vertex_cone(loop: Sequence[complex], k: int, name: str) -> NormalCone:
    n = len(loop)
    prev, here, nxt = loop[k - 1], loop[k], loop[(k + 1) % n]
    d_in, d_out = here - prev, nxt - here
    turn = math.atan2((d_out / d_in).imag, (d_out / d_in).real)
    if abs(turn + math.pi) <= CONE_TOL:
        turn = math.pi  # doubling back: zero interior angle
    feature = f"{name}.v{k}"
    if turn < -CONE_TOL:
        return NormalCone(here, empty=True, feature=feature)
    theta1 = _edge_normal(prev, here)
    if abs(turn) <= CONE_TOL:
        return NormalCone(here, theta1, theta1, feature=feature)
    return NormalCone(here, theta1, theta1 + turn, feature=feature)


def _intersect_cones(cones: List[NormalCone]) -> NormalCone:
    base, feature = cones[0].base, "+".join(c.feature for c in cones)
    if any(c.empty for c in cones):
        return NormalCone(base, empty=True, feature=feature)
    lo, hi = 0.0, cones[0].total_angle
    start = cones[0].theta1
    for c in cones[1:]:
        offset = (c.theta1 - start) % TWO_PI
        if offset > math.pi:
            offset -= TWO_PI
        lo, hi = max(lo, offset), min(hi, offset + c.total_angle)
    if hi < lo - CONE_TOL:
        return NormalCone(base, empty=True, feature=feature)
    return NormalCone(base, start + lo, start + max(lo, hi), feature=feature)


def normal_cone_at(B: PlanarSet, p: complex, tolerance: float = TOL) -> NormalCone:
    p = complex(p)
    corners = [
        _vertex_cone(loop, k, name)
        for name, loop in B.named_loops()
        for k, z in enumerate(loop)
        if abs(z - p) <= tolerance
    ]
    if corners:
        return corners[0] if len(corners) == 1 else _intersect_cones(corners)
    point = Point(p.real, p.imag)
    for name, k, a, b in B.boundary_segments():
        if LineString([(a.real, a.imag), (b.real, b.imag)]).distance(point) <= tolerance:
            theta = _edge_normal(a, b)
            return NormalCone(p, theta, theta, feature=f"{name}.e{k}")
    raise PreconditionError(f"point {p} is not on the boundary", hypothesis="p on boundary")


# ============= SEMI-SMOOTH CHECK =============

@dataclass
class SemiSmoothReport:
    passed: bool
    cones: List[NormalCone]
    witnesses: List[Dict] = field(default_factory=list)
    approximated: bool = False

    def to_dict(self) -> Dict:
        report = {
            "passed": self.passed,
            "cones": [c.to_dict() for c in self.cones],
            "witnesses": self.witnesses,
        }
        if self.approximated:
            report["note"] = "polygonal surrogate of a curved set; the limit condition is only checked at vertices"
        return report


def _angle_gap(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def semi_smooth_check(B: PlanarSet) -> SemiSmoothReport:
    """
    Check that every vertex of B has a non-empty normal cone narrower than pi, bounded by the edge normals.

    Args:
        B: Polygonal planar set

    Returns:
        SemiSmoothReport: the cone at each corner and a witness for every failure
    """
    cones, witnesses = [], []

    def witness(cone: NormalCone, reason: str):
        witnesses.append({"feature": cone.feature, "point": [cone.base.real, cone.base.imag], "reason": reason})

    for name, loop in B.named_loops():
        n = len(loop)
        for k in range(n):
            cone = _vertex_cone(loop, k, name)
            cones.append(cone)
            if cone.empty:
                witness(cone, "empty normal cone (reflex vertex)")
                continue
            if cone.total_angle >= math.pi - CONE_TOL:
                witness(cone, f"cone angle {cone.total_angle:.6g} is not less than pi (cusp)")
            incoming = _edge_normal(loop[k - 1], loop[k])
            outgoing = _edge_normal(loop[k], loop[(k + 1) % n])
            if _angle_gap(cone.theta1, incoming) > CONE_TOL or _angle_gap(cone.theta2, outgoing) > 2 * CONE_TOL:
                witness(cone, "cone endpoints do not match the adjacent edge normals")

    report = SemiSmoothReport(not witnesses, cones, witnesses, B.approximated)
    logger.info("semi-smooth check: %d vertices, %d witnesses", len(cones), len(witnesses))
    return report


# ============= LOCAL CHARTS =============

@dataclass
class ChartReport:
    point: complex
    feature: str
    frame_rotation: float
    interval: Tuple[float, float]
    half_height: float
    graph: List[Tuple[float, float]]
    single_valued: bool
    lipschitz: float
    subgraph_ok: bool
    rectangle: List[Tuple[float, float]]

    @property
    def passed(self) -> bool:
        return self.single_valued and self.subgraph_ok and math.isfinite(self.lipschitz)

    def to_dict(self) -> Dict:
        return {
            "point": [self.point.real, self.point.imag],
            "feature": self.feature,
            "frame_rotation": self.frame_rotation,
            "interval": list(self.interval),
            "half_height": self.half_height,
            "graph": [list(g) for g in self.graph],
            "single_valued": self.single_valued,
            "lipschitz": self.lipschitz,
            "subgraph_ok": self.subgraph_ok,
            "rectangle": [list(c) for c in self.rectangle],
            "passed": self.passed,
        }


def _chart_radius(B: PlanarSet, p: complex) -> float:
    point = Point(p.real, p.imag)
    far = []
    for _, _, a, b in B.boundary_segments():
        seg = LineString([(a.real, a.imag), (b.real, b.imag)])
        if seg.distance(point) > TOL:
            far.append(seg)
    if not far:
        raise StructuralError("boundary has no feature away from the chart point")
    return 0.5 * unary_union(far).distance(point)


def manifold_chart_extract(B: PlanarSet, p: complex, samples: Optional[int] = None) -> ChartReport:
    """Rotate so the cone bisector points up; near p the set is the region under a graph."""
    check = semi_smooth_check(B)
    if not check.passed:
        first = check.witnesses[0]
        raise PreconditionError(
            f"set is not semi-smooth ({first['feature']}: {first['reason']})", hypothesis="semi-smooth"
        )
    if samples is None:
        samples = SEMISMOOTH_CONFIG["chart_samples"]
    p = complex(p)
    cone = normal_cone_at(B, p)
    rotation = math.pi / 2 - cone.bisector()
    interior = math.pi - cone.total_angle

    rho = _chart_radius(B, p)
    a = 0.9 * rho * math.sin(interior / 2)
    b = rho
    local = affinity.translate(
        affinity.rotate(B.to_shapely(), rotation, origin=(p.real, p.imag), use_radians=True), -p.real, -p.imag
    ).intersection(box(-a, -b, a, b))

    xs = np.linspace(-a, a, samples)
    lines = shapely.linestrings([[(x, -b), (x, b)] for x in xs])
    cuts = shapely.intersection(local, lines)
    graph, single = [], True
    for x, cut in zip(xs, cuts):
        if cut.is_empty or cut.geom_type != "LineString":
            single = False
            graph.append((float(x), float("nan")))
            continue
        _, lo, _, hi = cut.bounds
        if lo > -b + TOL or hi >= b - TOL:
            single = False
        graph.append((float(x), float(hi)))

    g = np.array([y for _, y in graph])
    lipschitz = float(np.max(np.abs(np.diff(g) / np.diff(xs)))) if single else float("inf")
    subgraph_ok = False
    if single:
        under = ShapelyPolygon([(-a, -b)] + graph + [(a, -b)])
        subgraph_ok = local.symmetric_difference(under).area <= 1e-9 * (4 * a * b)

    back = complex(math.cos(-rotation), math.sin(-rotation))
    rectangle = [((complex(x, y) * back) + p) for x, y in ((-a, -b), (a, -b), (a, b), (-a, b))]
    return ChartReport(
        p,
        cone.feature,
        rotation,
        (-a, a),
        b,
        graph,
        single,
        lipschitz,
        subgraph_ok,
        [(z.real, z.imag) for z in rectangle],
    )


# ============= CLOSED CURVES =============

@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Closed polyline; vertex k sits at parameter k/n of the circle R/Z."""

    points: np.ndarray

    @classmethod
    def from_points(cls, points) -> "ClosedCurve":
        z = _as_complex(points)
        if len(z) < 3:
            raise StructuralError("a closed curve needs at least 3 points")
        if np.any(np.abs(np.roll(z, -1) - z) <= TOL):
            raise StructuralError("consecutive curve points must be distinct")
        return cls(z)

    @property
    def size(self) -> int:
        return len(self.points)

    def parameters(self) -> np.ndarray:
        return np.arange(self.size) / self.size

    def evaluate(self, t) -> np.ndarray:
        n = self.size
        pos = (np.asarray(t, dtype=float) % 1.0) * n
        k = np.minimum(np.floor(pos).astype(int), n - 1)
        frac = pos - k
        return self.points[k] + frac * (self.points[(k + 1) % n] - self.points[k])

    def edge_lengths(self) -> np.ndarray:
        return np.abs(np.roll(self.points, -1) - self.points)

    def length(self) -> float:
        return float(self.edge_lengths().sum())

    def at_arclength(self, s) -> np.ndarray:
        """Point at arc-length fraction s, measured from vertex 0."""
        seg = self.edge_lengths()
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        target = (np.asarray(s, dtype=float) % 1.0) * cum[-1]
        k = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, self.size - 1)
        frac = (target - cum[k]) / seg[k]
        return self.points[k] + frac * (self.points[(k + 1) % self.size] - self.points[k])

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.points[::-1].copy())

    def densified(self, max_edge: float) -> Tuple[np.ndarray, np.ndarray]:
        """Points and parameters after splitting every edge to length <= max_edge."""
        n = self.size
        pts, params = [], []
        for k, (z, length) in enumerate(zip(self.points, self.edge_lengths())):
            pieces = max(1, math.ceil(length / max_edge))
            frac = np.arange(pieces) / pieces
            pts.append(z + frac * (self.points[(k + 1) % n] - z))
            params.append((k + frac) / n)
        return np.concatenate(pts), np.concatenate(params)

    def to_linestring(self) -> LineString:
        z = np.append(self.points, self.points[0])
        return LineString(np.column_stack([z.real, z.imag]))

    def diameter(self) -> float:
        xy = np.column_stack([self.points.real, self.points.imag])
        return float(cdist(xy, xy).max())


def winding_number(curve: ClosedCurve, point: complex = 0j) -> int:
    d = curve.points - complex(point)
    if np.any(np.abs(d) <= TOL):
        raise PreconditionError(f"curve passes through {point}", hypothesis="point off curve")
    turns = np.angle(np.roll(d, -1) / d)
    return int(round(float(turns.sum()) / TWO_PI))


# ============= HAUSDORFF DISTANCE =============

def _as_geometry(obj):
    if isinstance(obj, PlanarSet):
        return obj.to_shapely()
    if isinstance(obj, ClosedCurve):
        return obj.to_linestring()
    return obj


def hausdorff_distance(A, B, window=None, densify: Optional[float] = None) -> float:
    """Symmetric Hausdorff distance of A ∩ window and B ∩ window.

    Accepts planar sets (as closed regions), closed curves or shapely geometries.
    """
    a, b = _as_geometry(A), _as_geometry(B)
    if window is not None:
        frame = box(*window) if isinstance(window, (tuple, list)) else window
        a, b = a.intersection(frame), b.intersection(frame)
    if a.is_empty or b.is_empty:
        raise PreconditionError("a set has no points inside the window", hypothesis="non-empty in window")
    if densify is None and shapely.get_num_coordinates(a) + shapely.get_num_coordinates(b) <= SEMISMOOTH_CONFIG[
        "densify_vertex_limit"
    ]:
        densify = SEMISMOOTH_CONFIG["hausdorff_densify"]
    return float(shapely.hausdorff_distance(a, b, densify=densify))


# ============= COLLAPSING FINGERS =============

@dataclass
class FingerWitness:
    curve_index: int
    x: float
    y: float
    z: float
    w: float
    pinch: float
    separation: float

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


@dataclass
class FingerReport:
    detected: bool
    delta_sep: float
    eps_pinch: float
    witnesses: List[Optional[FingerWitness]]

    @property
    def pinches(self) -> List[float]:
        return [w.pinch for w in self.witnesses if w is not None]

    def to_dict(self) -> Dict:
        return {
            "detected": self.detected,
            "delta_sep": self.delta_sep,
            "eps_pinch": self.eps_pinch,
            "pinches": self.pinches,
            "witnesses": [w.to_dict() if w else None for w in self.witnesses],
        }


def _nontrivial_pairs(D: np.ndarray, pairs: np.ndarray, eps: float) -> np.ndarray:
    """Keep close pairs (i<j) whose arc i..j leaves the eps-ball, nearest partner per side."""
    best: Dict[Tuple[int, int], Tuple[float, int]] = {}
    for i, j in pairs:
        if not np.any(D[i, i + 1: j] > eps):
            continue
        if not (np.any(D[i, j + 1:] > eps) or np.any(D[i, :i] > eps)):
            continue
        d = D[i, j]
        for key, partner in (((i, 1), j), ((j, 0), i)):
            if key not in best or d < best[key][0]:
                best[key] = (d, partner)
    chosen = {(min(k[0], p), max(k[0], p)) for k, (_, p) in best.items()}
    return np.array(sorted(chosen), dtype=int).reshape(-1, 2)


def _finger_witness(curve: ClosedCurve, index: int, delta: float, eps: float) -> Optional[FingerWitness]:
    pts, params = curve.densified(eps / 4)
    xy = np.column_stack([pts.real, pts.imag])
    pairs = cKDTree(xy).query_pairs(eps, output_type="ndarray")
    if len(pairs) < 2:
        return None
    D = cdist(xy, xy)
    chords = _nontrivial_pairs(D, pairs, eps)
    if len(chords) < 2:
        return None
    a, b = chords[:, 0], chords[:, 1]
    # chords (x, z) and (y, w) interleave as x < y < z < w
    inter = (a[:, None] < a[None, :]) & (a[None, :] < b[:, None]) & (b[:, None] < b[None, :])
    inter &= D[a[:, None], a[None, :]] > delta
    first, second = np.nonzero(inter)
    if len(first) == 0:
        return None
    pinch = np.maximum(D[a[first], b[first]], D[a[second], b[second]])
    best = int(np.argmin(pinch))
    x, z, y, w = a[first[best]], b[first[best]], a[second[best]], b[second[best]]
    return FingerWitness(index, float(params[x]), float(params[y]), float(params[z]), float(params[w]), float(pinch[best]), float(D[x, y]))


def detect_collapsing_finger(
    curves: Sequence[ClosedCurve],
    delta_sep: Optional[float] = None,
    eps_pinch: Optional[float] = None,
) -> FingerReport:
    """
    Look for a collapsing finger: two strands of a curve, far apart along it, pinching together.

    Args:
        curves: The sequence, in order, at least two curves long
        delta_sep: Arc separation the strands need; a fraction of the last diameter when None
        eps_pinch: Gap below which strands count as pinched; a fraction of the last diameter when None

    Returns:
        FingerReport: detected when the last curve has a witness and the pinches never widen
    """
    if len(curves) < 2:
        raise PreconditionError("finger detection needs a sequence of at least 2 curves", hypothesis=">= 2 curves")
    diameter = curves[-1].diameter()
    if delta_sep is None:
        delta_sep = SEMISMOOTH_CONFIG["separation_fraction"] * diameter
    if eps_pinch is None:
        eps_pinch = SEMISMOOTH_CONFIG["pinch_fraction"] * diameter

    witnesses = [_finger_witness(c, k, delta_sep, eps_pinch) for k, c in enumerate(curves)]
    found = [w.pinch for w in witnesses if w is not None]
    shrinking = all(b <= a + 1e-12 for a, b in zip(found, found[1:]))
    detected = witnesses[-1] is not None and shrinking
    report = FingerReport(detected, delta_sep, eps_pinch, witnesses)
    logger.info("finger detection over %d curves: detected=%s, pinches=%s", len(curves), detected, found)
    return report


# ============= UNIFORM REPARAMETRIZATION =============

@dataclass
class ReparamResult:
    index: int
    partitions: int
    winding: int
    reversed: bool
    zeta: np.ndarray
    xi: np.ndarray
    sup_error: float
    samples: np.ndarray

    @property
    def orientation_preserving(self) -> bool:
        return bool(np.all(np.diff(self.xi) > 0) and self.xi[-1] < self.xi[0] + 1.0)

    def sigma(self, tau) -> np.ndarray:
        """The piecewise-linear homeomorphism of R/Z, lifted."""
        zeta = np.append(self.zeta, self.zeta[0] + 1.0)
        xi = np.append(self.xi, self.xi[0] + 1.0)
        tau = np.asarray(tau, dtype=float)
        shift = np.floor(tau - self.zeta[0])
        return np.interp(tau - shift, zeta, xi) + shift

    def to_dict(self) -> Dict:
        return {
            "index": self.index,
            "partitions": self.partitions,
            "winding": self.winding,
            "reversed": self.reversed,
            "sup_error": self.sup_error,
            "orientation_preserving": self.orientation_preserving,
        }


@dataclass
class ReparamReport:
    results: List[ReparamResult]

    @property
    def sup_errors(self) -> List[float]:
        return [r.sup_error for r in self.results]

    @property
    def non_increasing(self) -> bool:
        e = self.sup_errors
        return all(b <= a + 1e-12 for a, b in zip(e, e[1:]))

    def to_dict(self) -> Dict:
        return {
            "sup_errors": self.sup_errors,
            "non_increasing": self.non_increasing,
            "curves": [r.to_dict() for r in self.results],
        }


def _normalizer(limit: ClosedCurve) -> Callable[[np.ndarray], np.ndarray]:
    """Homeomorphism near the limit onto a neighborhood of the unit circle.

    A point maps to exp(2π d / L) e^{2πi s}, with s its arc-length position on
    the limit, d its signed distance (negative inside) and L the limit's length.
    """
    ring = limit.to_linestring()
    region = ShapelyPolygon(ring.coords)
    perimeter = ring.length

    def normalize(z: np.ndarray) -> np.ndarray:
        pts = shapely.points(z.real, z.imag)
        s = shapely.line_locate_point(ring, pts, normalized=True)
        d = shapely.distance(ring, pts)
        signed = np.where(shapely.contains_xy(region, z.real, z.imag), -d, d)
        return np.exp(TWO_PI * signed / perimeter + 2j * np.pi * s)

    return normalize


def _winding_about_origin(u: np.ndarray) -> int:
    return int(round(float(np.angle(np.roll(u, -1) / u).sum()) / TWO_PI))


def _crossings(lifted: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """First parameters, in order, where the lifted angle reaches each sorted target."""
    n = len(lifted) - 1
    out = np.empty(len(targets))
    k = 0
    for j, theta in enumerate(targets):
        while k < n:
            lo, hi = lifted[k], lifted[k + 1]
            if min(lo, hi) - 1e-15 <= theta <= max(lo, hi) + 1e-15:
                frac = 0.0 if hi == lo else (theta - lo) / (hi - lo)
                out[j] = (k + min(max(frac, 0.0), 1.0)) / n
                break
            k += 1
        else:
            raise PreconditionError("lifted angle never reaches a partition point", hypothesis="winding +1")
    return out


def reparametrize_to_uniform(
    curves: Sequence[ClosedCurve],
    limit: ClosedCurve,
    partitions: Optional[Sequence[int]] = None,
) -> ReparamReport:
    """Reparametrize each curve by the angle of its normalized image.

    The limit is sent to the round circle, each curve's winding number about
    the origin is made +1, R/Z is cut into m congruent arcs and the parameters
    where the angle reaches them define a piecewise-linear homeomorphism.

    Args:
        curves: Sequence converging to the limit
        limit: Simple closed limit curve
        partitions: Arcs per curve; multiples of SEMISMOOTH_CONFIG base_partitions when None

    Returns:
        ReparamReport: one result per curve with its sup error against the limit

    Raises:
        PreconditionError: the sequence has a collapsing finger or has not converged
    """
    if not curves:
        raise PreconditionError("no curves given", hypothesis="non-empty sequence")
    if not limit.to_linestring().is_simple:
        raise PreconditionError("limit curve is not simple", hypothesis="limit simple")
    if len(curves) >= 2:
        fingers = detect_collapsing_finger(curves)
        if fingers.detected:
            raise PreconditionError(
                f"sequence has a collapsing finger (pinch {fingers.pinches[-1]:.3g})", hypothesis="no collapsing finger"
            )
    gap = hausdorff_distance(curves[-1], limit)
    if gap > SEMISMOOTH_CONFIG["separation_fraction"] * limit.diameter():
        raise PreconditionError(f"last curve is {gap:.3g} from the limit in Hausdorff distance", hypothesis="convergence")
    if partitions is None:
        step = SEMISMOOTH_CONFIG["base_partitions"]
        partitions = [step * (k + 1) for k in range(len(curves))]

    normalize = _normalizer(limit)
    results = []
    for index, (curve, m) in enumerate(zip(curves, partitions)):
        u = normalize(curve.points)
        winding = _winding_about_origin(u)
        flipped = False
        if winding == -1:
            curve, flipped = curve.reversed(), True
            u = normalize(curve.points)
        elif winding != 1:
            raise PreconditionError(
                f"curve {index} has winding number {winding} about the normalized origin; a collapsing finger obstructs",
                hypothesis="winding +-1",
            )

        lifted = np.unwrap(np.angle(np.append(u, u[0])))
        zeta = np.arange(m) / m
        # lift each partition angle into [lifted[0], lifted[0] + 2π)
        theta = TWO_PI * zeta + TWO_PI * np.ceil((lifted[0] - TWO_PI * zeta) / TWO_PI - 1e-15)
        order = np.argsort(theta)
        xi = _crossings(lifted, theta[order])
        zeta_lift = theta[order] / TWO_PI

        result = ReparamResult(index, m, winding, flipped, zeta_lift, xi, 0.0, np.empty(0, dtype=complex))
        tau = zeta_lift[0] + np.arange(8 * m) / (8 * m)
        samples = curve.evaluate(result.sigma(tau))
        result.samples = samples
        result.sup_error = float(np.max(np.abs(samples - limit.at_arclength(tau))))
        results.append(result)

    report = ReparamReport(results)
    logger.info("reparametrized %d curves, sup errors %s", len(results), report.sup_errors)
    return report


# ============= BUILDERS =============

def square(side: float = 1.0) -> PlanarSet:
    return PlanarSet((0j, complex(side, 0), complex(side, side), complex(0, side)))


def convex_polygon(n: int = 6, radius: float = 1.0) -> PlanarSet:
    return PlanarSet(tuple(radius * np.exp(2j * np.pi * np.arange(n) / n)))


def l_shape() -> PlanarSet:
    return PlanarSet((0j, 2 + 0j, 2 + 1j, 1 + 1j, 1 + 2j, 2j))


def spike_polygon(length: float = 0.5) -> PlanarSet:
    """Unit square with a zero-width spike sticking out of the top edge."""
    return PlanarSet((0j, 1 + 0j, 1 + 1j, 0.5 + 1j, complex(0.5, 1 + length), 0.5 + 1j, 1j))


def dilated_square(margin: float, side: float = 1.0) -> PlanarSet:
    """Mitred outward offset of the square."""
    lo, hi = -margin, side + margin
    return PlanarSet((complex(lo, lo), complex(hi, lo), complex(hi, hi), complex(lo, hi)))


def circle_curve(radius: float = 1.0, samples: Optional[int] = None, phase: float = 0.0, center: complex = 0j) -> ClosedCurve:
    n = samples or SEMISMOOTH_CONFIG["curve_samples"]
    return ClosedCurve(center + radius * np.exp(1j * (phase + TWO_PI * np.arange(n) / n)))


def ellipse_curve(a: float, b: float, samples: Optional[int] = None, skew: float = 0.0) -> ClosedCurve:
    """x = a cos φ, y = b sin φ with φ = 2πt + skew·sin(2πt); |skew| < 1 keeps it monotone."""
    n = samples or SEMISMOOTH_CONFIG["curve_samples"]
    t = np.arange(n) / n
    phi = TWO_PI * t + skew * np.sin(TWO_PI * t)
    return ClosedCurve(a * np.cos(phi) + 1j * b * np.sin(phi))


def spiked_circle(k: int, depth: float = 0.5, samples: Optional[int] = None) -> ClosedCurve:
    """Unit circle with two adjacent inward spikes of width 1/k and the given depth.

    The walls of the pair run in, out, in, out at heights -1.5w, -0.5w, 0.5w, 1.5w,
    so three strands crowd onto one radial segment as k grows.
    """
    n = samples or SEMISMOOTH_CONFIG["curve_samples"]
    w = 1.0 / k
    levels = (-1.5 * w, -0.5 * w, 0.5 * w, 1.5 * w)
    angles = np.linspace(math.asin(levels[3]), TWO_PI + math.asin(levels[0]), n)
    tip = 1.0 - depth
    mouth = math.sqrt(1.0 - levels[1] ** 2)
    spikes = [complex(tip, levels[0]), complex(tip, levels[1]), complex(mouth, levels[1]),
              complex(mouth, levels[2]), complex(tip, levels[2]), complex(tip, levels[3])]
    return ClosedCurve.from_points(np.concatenate([np.exp(1j * angles), spikes]))


def dumbbell_curve(neck_width: float, radius: float = 0.8, spacing: float = 2.0) -> ClosedCurve:
    """Outline of two disks joined by a straight neck."""
    half = spacing / 2
    shape = unary_union([
        Point(-half, 0).buffer(radius, quad_segs=64),
        Point(half, 0).buffer(radius, quad_segs=64),
        box(-half, -neck_width / 2, half, neck_width / 2),
    ])
    xy = np.asarray(orient(shape, 1.0).exterior.coords)[:-1]
    z = xy[:, 0] + 1j * xy[:, 1]
    keep = np.abs(np.roll(z, -1) - z) > TOL
    return ClosedCurve.from_points(z[keep])


def spiked_circle_family(ks: Sequence[int] = (20, 40, 80, 160)):
    return [spiked_circle(k) for k in ks], circle_curve()


def rotated_circle_family(ks: Sequence[int] = (1, 2, 3, 4)):
    return [circle_curve(phase=0.37 * k) for k in ks], circle_curve()


def ellipse_family(ks: Sequence[int] = (4, 8, 16, 32)):
    return [ellipse_curve(1.0, 1.0 + 1.0 / k) for k in ks], circle_curve()


def skew_ellipse_family(ks: Sequence[int] = (4, 8, 16, 32)):
    return [ellipse_curve(1.0, 1.0 + 1.0 / k, skew=0.5) for k in ks], circle_curve()


def rotated_parametrization_family(ks: Sequence[int] = (1, 2, 3, 4)):
    base = circle_curve()
    return [ClosedCurve(np.roll(base.points, 17 * k)) for k in ks], base


def dumbbell_family(ks: Sequence[int] = (8, 16, 32, 64)):
    return [dumbbell_curve(0.2 + 1.0 / k) for k in ks], dumbbell_curve(0.2)


CURVE_FAMILIES: Dict[str, Callable] = {
    "spiked_circles": spiked_circle_family,
    "rotated_circles": rotated_circle_family,
    "ellipses": ellipse_family,
    "skew_ellipses": skew_ellipse_family,
    "rotated_parametrizations": rotated_parametrization_family,
    "pinched_dumbbells": dumbbell_family,
}

PLANAR_SETS: Dict[str, Callable[[], PlanarSet]] = {
    "square": square,
    "hexagon": convex_polygon,
    "l_shape": l_shape,
    "spike": spike_polygon,
}


if __name__ == "__main__":
    print(normal_cone_at(square(), 0j).to_dict())
    print(semi_smooth_check(l_shape()).witnesses)
    print(f"Hausdorff square vs dilation: {hausdorff_distance(square(), dilated_square(0.05)):.6f}")
    for name, build in CURVE_FAMILIES.items():
        curves, limit = build()
        print(name, detect_collapsing_finger(curves).detected)
