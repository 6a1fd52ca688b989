"""
Partial measured foliations and extremal length
Location: geometry/foliation_el.py

A foliation is stored as a piecewise-affine potential v on a triangulated copy
of a surface: one value per triangle corner, transverse measure |dv|. The
module also carries the finite-difference modulus solver used to cross-check
extremal lengths on annuli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import shapely
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve
from shapely import affinity
from shapely.geometry import LineString
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry import box
from shapely.ops import unary_union

from config import FOLIATION_CONFIG, MODULUS_CONFIG, TOLERANCE_CONFIG
from geometry.errors import BudgetExhaustedError, GeometryError, PreconditionError
from geometry.qc_maps import PiecewiseAffineMap, apply_matrix, image_surface, matrix_dilatation
from geometry.surface_core import (
    BOUNDARY,
    Corner,
    EdgeRef,
    HalfTranslationSurface,
    SurfacePoint,
    area,
    refine_triangles,
    triangulate,
)
from utils.logger import get_logger

logger = get_logger(__name__)

HORIZONTAL_FOLIATION = "horizontal"
VERTICAL_FOLIATION = "vertical"
ORIENTATIONS = (HORIZONTAL_FOLIATION, VERTICAL_FOLIATION)

CLOSED = "closed"
CROSS_CUT = "cross_cut"

OrientedEdge = Tuple[EdgeRef, bool]  # canonical mesh edge, traversed along its own direction?


# ============= FOLIATIONS =============

@dataclass(frozen=True, eq=False)
class PartialFoliation:
    """Potential values at the corners of every triangle of `surface`.

    `parent_polygon[t]` is the polygon of `base` containing triangle t.
    """

    surface: HalfTranslationSurface
    values: np.ndarray  # (triangles, 3)
    base: HalfTranslationSurface
    parent_polygon: Tuple[int, ...]
    orientation: str = "custom"

    @property
    def triangles(self) -> int:
        return len(self.surface.polygons)

    def corner_points(self) -> np.ndarray:
        return np.array([[complex(v) for v in tri.vertices] for tri in self.surface.polygons])


@dataclass(frozen=True)
class Transition:
    pairing_index: int
    sign: int
    constant: float
    residual: float


@dataclass(frozen=True)
class ExtremalLengthReport:
    value: float
    energy: float
    area: Optional[float]
    orientation: str
    exact: bool

    @property
    def label(self) -> str:
        return "extremal length" if self.exact else "Dirichlet upper bound"

    def to_dict(self) -> Dict:
        return {
            "value": self.value,
            "energy": self.energy,
            "area": self.area,
            "orientation": self.orientation,
            "exact": self.exact,
            "label": self.label,
        }


def foliation_from_differential(s: HalfTranslationSurface, orientation: str = HORIZONTAL_FOLIATION) -> PartialFoliation:
    """Horizontal foliation has v = Im z per chart, vertical has v = Re z."""
    if orientation not in ORIENTATIONS:
        raise PreconditionError(f"orientation must be one of {ORIENTATIONS}", hypothesis="orientation")
    tri = triangulate(s)
    corners = np.array([[complex(v) for v in t.vertices] for t in tri.surface.polygons])
    values = corners.imag if orientation == HORIZONTAL_FOLIATION else corners.real
    return PartialFoliation(tri.surface, np.ascontiguousarray(values, dtype=float), s, tri.parent_polygon, orientation)


def _edge_values(f: PartialFoliation, e: EdgeRef) -> Tuple[float, float]:
    return float(f.values[e.polygon_id, e.edge_index % 3]), float(f.values[e.polygon_id, (e.edge_index + 1) % 3])


def transitions(f: PartialFoliation) -> List[Transition]:
    """Fit v_a = eps * v_b + c along every glued edge (start of a meets end of b)."""
    out = []
    for k, p in enumerate(f.surface.pairings):
        a0, a1 = _edge_values(f, p.a)
        b0, b1 = _edge_values(f, p.b)
        best = None
        for eps in (p.sign, -p.sign):
            c = 0.5 * ((a0 - eps * b1) + (a1 - eps * b0))
            residual = max(abs(a0 - eps * b1 - c), abs(a1 - eps * b0 - c))
            if best is None or residual < best.residual - TOLERANCE_CONFIG["exact"]:
                best = Transition(k, eps, c, residual)
        out.append(best)
    return out


def compatibility_residual(f: PartialFoliation) -> float:
    return max((t.residual for t in transitions(f)), default=0.0)


def potential_gradients(f: PartialFoliation) -> Tuple[np.ndarray, np.ndarray]:
    """Per-triangle gradient (x, y) of v and triangle areas."""
    z = f.corner_points()
    d1, d2 = z[:, 1] - z[:, 0], z[:, 2] - z[:, 0]
    A = np.stack([np.stack([d1.real, d1.imag], axis=-1), np.stack([d2.real, d2.imag], axis=-1)], axis=1)
    rhs = np.stack([f.values[:, 1] - f.values[:, 0], f.values[:, 2] - f.values[:, 0]], axis=-1)
    grads = np.linalg.solve(A, rhs[..., None])[..., 0]
    areas = 0.5 * (d1.real * d2.imag - d1.imag * d2.real)
    return grads, areas


def dirichlet_energy(f: PartialFoliation) -> float:
    grads, areas = potential_gradients(f)
    return float(np.sum(np.sum(grads ** 2, axis=1) * areas))


def scale_foliation(f: PartialFoliation, factor: float) -> PartialFoliation:
    return PartialFoliation(f.surface, f.values * factor, f.base, f.parent_polygon, f.orientation)


def refine_foliation(f: PartialFoliation, divisions: int) -> PartialFoliation:
    """Uniform subdivision; each sub-triangle inherits its parent's affine potential."""
    refined = refine_triangles(f.surface, divisions)
    grads, _ = potential_gradients(f)
    per_parent = divisions * divisions
    values = np.empty((len(refined.polygons), 3))
    parents = []
    for k, tri in enumerate(refined.polygons):
        t = k // per_parent
        origin = f.surface.polygons[t].vertex(0)
        for j, z in enumerate(tri.vertices):
            d = z - origin
            values[k, j] = f.values[t, 0] + grads[t, 0] * d.real + grads[t, 1] * d.imag
        parents.append(f.parent_polygon[t])
    return PartialFoliation(refined, values, f.base, tuple(parents), f.orientation)


# ============= EXTREMAL LENGTH =============

def extremal_length_of_structure(s: HalfTranslationSurface, orientation: str = HORIZONTAL_FOLIATION) -> ExtremalLengthReport:
    """
    Extremal length of the structure's own foliation, which equals its energy and the area of s.

    Args:
        s: Surface with horizontal boundary or none
        orientation: HORIZONTAL_FOLIATION or VERTICAL_FOLIATION

    Returns:
        ExtremalLengthReport: exact value, energy and area
    """
    if s.has_free_boundary:
        raise PreconditionError("extremal length needs horizontal boundary", hypothesis="horizontal boundary")
    energy = dirichlet_energy(foliation_from_differential(s, orientation))
    total = area(s)
    if abs(energy - total) > TOLERANCE_CONFIG["energy"] * max(1.0, total):
        raise GeometryError(f"energy {energy} of the structure foliation differs from its area {total}")
    return ExtremalLengthReport(energy, energy, total, orientation, True)


def extremal_length_upper_bound(f: PartialFoliation) -> ExtremalLengthReport:
    energy = dirichlet_energy(f)
    return ExtremalLengthReport(energy, energy, None, f.orientation, False)


@dataclass(frozen=True)
class MonotonicityReport:
    passed: bool
    energy_before: float
    energy_after: float
    K: float
    dilatation: float
    equality: bool
    tolerance: float

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def _same_vertices(a: HalfTranslationSurface, b: HalfTranslationSurface) -> bool:
    if len(a.polygons) != len(b.polygons):
        return False
    return all(
        p.n == q.n and all(abs(u - w) <= TOLERANCE_CONFIG["exact"] for u, w in zip(p.vertices, q.vertices))
        for p, q in zip(a.polygons, b.polygons)
    )


def pushforward_foliation(f: PartialFoliation, m: PiecewiseAffineMap) -> PartialFoliation:
    """Transport the charts by m; potentials keep their values at the image corners.

    m may be defined on the foliation's triangles or on its base polygons.
    """
    if m.domain is f.surface or _same_vertices(m.domain, f.surface):
        faces = list(range(f.triangles))
        parents = tuple(m.face_map[t] for t in faces)
    elif m.domain is f.base or _same_vertices(m.domain, f.base):
        faces = list(f.parent_polygon)
        parents = tuple(m.face_map[p] for p in faces)
    else:
        raise PreconditionError("map is not defined on the foliation's surface", hypothesis="composable")
    images = []
    for t, face in enumerate(faces):
        M = m.matrices[face]
        if np.linalg.det(M) <= TOLERANCE_CONFIG["exact"]:
            raise PreconditionError(f"map is not injective on face {face}", hypothesis="injective faces")
        images.append([apply_matrix(M, v) + complex(m.translations[face]) for v in f.surface.polygons[t].vertices])
    pushed = image_surface(f.surface, images)
    return PartialFoliation(pushed, f.values.copy(), m.codomain, parents, f.orientation)


def el_monotonicity_check(f: PartialFoliation, m: PiecewiseAffineMap, K: float) -> MonotonicityReport:
    """Energy grows by at most the factor K under a K-quasiconformal map."""
    K_map = max(matrix_dilatation(M) for M in m.matrices)
    if K_map > K + TOLERANCE_CONFIG["exact"]:
        raise PreconditionError(f"map dilatation {K_map} exceeds K={K}", hypothesis="K-quasiconformal")
    before = dirichlet_energy(f)
    after = dirichlet_energy(pushforward_foliation(f, m))
    tol = TOLERANCE_CONFIG["energy"]
    return MonotonicityReport(
        passed=after <= K * before + tol,
        energy_before=before,
        energy_after=after,
        K=K,
        dilatation=K_map,
        equality=abs(after - K * before) <= tol,
        tolerance=tol,
    )


# ============= CURVE CLASSES AND HEIGHTS =============

@dataclass(frozen=True)
class CurveClass:
    representative: Tuple[OrientedEdge, ...]
    kind: str = CLOSED


@dataclass(frozen=True)
class HeightReport:
    height: float
    representative: Tuple[OrientedEdge, ...]
    moves: int
    stabilized: bool
    budget: int

    def to_dict(self) -> Dict:
        return {
            "height": self.height,
            "representative": [[str(e), forward] for e, forward in self.representative],
            "moves": self.moves,
            "stabilized": self.stabilized,
            "budget": self.budget,
        }


def _canonical(s: HalfTranslationSurface, e: EdgeRef) -> OrientedEdge:
    """Triangle edge e, as the lower of e and its partner, traversed as e runs."""
    found = s.partner(e)
    if found is None or e <= found[0]:
        return e, True
    # gluings send the start of an edge to the end of its partner
    return found[0], False


def _reverse(o: OrientedEdge) -> OrientedEdge:
    return o[0], not o[1]


def _tail(s: HalfTranslationSurface, o: OrientedEdge) -> int:
    e, forward = o
    k = e.edge_index if forward else e.edge_index + 1
    return s.cycle_of(Corner(e.polygon_id, k))


def _head(s: HalfTranslationSurface, o: OrientedEdge) -> int:
    return _tail(s, _reverse(o))


def _mesh_vertex(f: PartialFoliation, point: SurfacePoint) -> Tuple[int, int, int]:
    """(triangle, local vertex, vertex cycle) of a mesh vertex given in base coordinates."""
    for t, parent in enumerate(f.parent_polygon):
        if parent != point.polygon_id:
            continue
        for k, v in enumerate(f.surface.polygons[t].vertices):
            if abs(v - point.position) <= TOLERANCE_CONFIG["exact"]:
                return t, k, f.surface.cycle_of(Corner(t, k))
    raise PreconditionError(f"point {point} is not a mesh vertex", hypothesis="representative on mesh")


def edge_path_class(f: PartialFoliation, points: Sequence[SurfacePoint], kind: str = CLOSED) -> CurveClass:
    """Class of the mesh edge path through the given vertices.

    Consecutive points in different polygons must be the same surface point.
    """
    path: List[OrientedEdge] = []
    for p, q in zip(points, points[1:]):
        if p.polygon_id != q.polygon_id:
            if _mesh_vertex(f, p)[2] != _mesh_vertex(f, q)[2]:
                raise PreconditionError(f"{p} and {q} are not glued", hypothesis="connected representative")
            continue
        step = None
        for t, parent in enumerate(f.parent_polygon):
            if parent != p.polygon_id:
                continue
            tri = f.surface.polygons[t]
            for j in range(3):
                a, b = tri.edge_endpoints(j)
                if abs(a - p.position) <= TOLERANCE_CONFIG["exact"] and abs(b - q.position) <= TOLERANCE_CONFIG["exact"]:
                    step = _canonical(f.surface, EdgeRef(t, j))
                elif abs(b - p.position) <= TOLERANCE_CONFIG["exact"] and abs(a - q.position) <= TOLERANCE_CONFIG["exact"]:
                    step = _reverse(_canonical(f.surface, EdgeRef(t, j)))
                if step is not None:
                    break
            if step is not None:
                break
        if step is None:
            raise PreconditionError(f"no mesh edge joins {p} and {q}", hypothesis="representative on mesh")
        path.append(step)
    if not path:
        raise PreconditionError("a curve class needs at least one edge", hypothesis="representative on mesh")
    s = f.surface
    for x, y in zip(path, path[1:]):
        if _head(s, x) != _tail(s, y):
            raise PreconditionError("representative is not connected", hypothesis="connected representative")
    if kind == CLOSED and _head(s, path[-1]) != _tail(s, path[0]):
        raise PreconditionError("closed representative does not close up", hypothesis="closed curve")
    if kind == CROSS_CUT:
        ends = (s.vertex_cycles[_tail(s, path[0])], s.vertex_cycles[_head(s, path[-1])])
        if any(c.location != BOUNDARY for c in ends):
            raise PreconditionError("cross-cut endpoints must lie on the boundary", hypothesis="cross-cut")
    return CurveClass(tuple(path), kind)


def loop_class(f: PartialFoliation, points: Sequence[SurfacePoint]) -> CurveClass:
    return edge_path_class(f, points, CLOSED)


def cylinder_cross_cut_class(f: PartialFoliation, polygon_id: int = 0) -> CurveClass:
    """Bottom-to-top path up the left side of a cylinder polygon."""
    left = min(v.real for v in f.base.polygons[polygon_id].vertices)
    heights = sorted(
        {
            round(v.imag, 12)
            for t, parent in enumerate(f.parent_polygon)
            if parent == polygon_id
            for v in f.surface.polygons[t].vertices
            if abs(v.real - left) <= TOLERANCE_CONFIG["exact"]
        }
    )
    return edge_path_class(f, [SurfacePoint(polygon_id, complex(left, y)) for y in heights], CROSS_CUT)


class _HeightSearch:
    """Greedy homotopy moves on a mesh edge path, never increasing ∫|dv|."""

    def __init__(self, f: PartialFoliation, kind: str):
        self.s = f.surface
        self.kind = kind
        self.cost: Dict[EdgeRef, float] = {}
        self.slides: Dict[Tuple[OrientedEdge, OrientedEdge], OrientedEdge] = {}
        self.sides: Dict[OrientedEdge, List[Tuple[OrientedEdge, OrientedEdge]]] = {}
        for t in range(len(self.s.polygons)):
            o = [_canonical(self.s, EdgeRef(t, j)) for j in range(3)]
            for j in range(3):
                self.cost.setdefault(o[j][0], abs(float(f.values[t, (j + 1) % 3] - f.values[t, j])))
                self.slides.setdefault((o[j], o[(j + 1) % 3]), _reverse(o[(j + 2) % 3]))
                self.slides.setdefault((_reverse(o[j]), _reverse(o[j - 1])), o[(j + 1) % 3])
                self.sides.setdefault(o[j], []).append((_reverse(o[j - 1]), _reverse(o[(j + 1) % 3])))
                self.sides.setdefault(_reverse(o[j]), []).append((o[(j + 1) % 3], o[j - 1]))
        self.tol = 1e-12 * max([1.0] + list(self.cost.values()))

    def total(self, path: Sequence[OrientedEdge]) -> float:
        return sum(self.cost[e] for e, _ in path)

    def _is_boundary_end(self, o: OrientedEdge) -> bool:
        return self.s.is_boundary(o[0])

    def reduce_once(self, path: List[OrientedEdge]) -> Optional[List[OrientedEdge]]:
        n = len(path)
        if n == 0:
            return None
        pairs = range(n) if self.kind == CLOSED and n > 1 else range(n - 1)
        for i in pairs:
            j = (i + 1) % n
            x, y = path[i], path[j]
            if y == _reverse(x):
                return self._splice(path, i, j, [])
            slide = self.slides.get((x, y))
            if slide is not None and self.cost[slide[0]] <= self.cost[x[0]] + self.cost[y[0]] + self.tol:
                return self._splice(path, i, j, [slide])
        if self.kind == CROSS_CUT and n > 1:
            # an end edge lying in the boundary can be dropped
            if self._is_boundary_end(path[0]):
                return path[1:]
            if self._is_boundary_end(path[-1]):
                return path[:-1]
        return None

    def _splice(self, path, i, j, middle):
        if j > i:
            return path[:i] + middle + path[j + 1:]
        # wrap-around pair of a closed path: drop the ends, put the replacement last
        return path[1:i] + middle

    def lookahead(self, path: List[OrientedEdge]) -> Optional[List[OrientedEdge]]:
        base_cost, base_len = self.total(path), len(path)
        for i, x in enumerate(path):
            for a, b in self.sides.get(x, []):
                expanded = path[:i] + [a, b] + path[i + 1:]
                reduced = self.reduce_once(expanded)
                if reduced is None:
                    continue
                cost = self.total(reduced)
                if cost < base_cost - self.tol or (cost <= base_cost + self.tol and len(reduced) < base_len):
                    return reduced
        return None


def height_of_class(
    f: PartialFoliation, c: CurveClass, budget: Optional[int] = None, strict: bool = True
) -> HeightReport:
    """Least ∫|dv| over mesh paths reached from the representative by at most `budget` moves."""
    budget = FOLIATION_CONFIG["height_move_budget"] if budget is None else budget
    search = _HeightSearch(f, c.kind)
    path = list(c.representative)
    moves = 0
    while True:
        step = search.reduce_once(path)
        if step is None:
            step = search.lookahead(path)
        if step is None:
            return HeightReport(search.total(path), tuple(path), moves, True, budget)
        if moves >= budget:
            if strict:
                raise BudgetExhaustedError(f"height did not stabilize within {budget} moves", budget=budget)
            logger.warning("height search stopped at the %d-move budget", budget)
            return HeightReport(search.total(path), tuple(path), moves, False, budget)
        path = step
        moves += 1


# ============= MODULUS ORACLE =============

@dataclass(frozen=True, eq=False)
class ConductorDomain:
    """Doubly connected region with potential 0 on `zero` and 1 on `one`.

    With a period the region is a strip whose vertical sides are identified.
    """

    region: object
    zero: object
    one: object
    period: Optional[float] = None
    label: str = ""


@dataclass(frozen=True)
class ModulusReport:
    modulus: float
    energy: float
    grid_h: float
    nodes: int
    label: str

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def rectangle_conductor(width: float, height: float, periodic: bool = False) -> ConductorDomain:
    region = box(0.0, 0.0, width, height)
    return ConductorDomain(
        region,
        LineString([(0.0, 0.0), (width, 0.0)]),
        LineString([(0.0, height), (width, height)]),
        width if periodic else None,
        f"rectangle {width}x{height}",
    )


def cylinder_conductor(height: float, circumference: float = 1.0) -> ConductorDomain:
    return rectangle_conductor(circumference, height, periodic=True)


def round_annulus(inner: float, outer: float) -> ConductorDomain:
    """r < |z| < R, solved in log coordinates where it is a periodic strip."""
    if not 0 < inner < outer:
        raise PreconditionError("round annulus needs 0 < r < R", hypothesis="0<r<R")
    lo, hi = math.log(inner), math.log(outer)
    width = 2 * math.pi
    return ConductorDomain(
        box(0.0, lo, width, hi),
        LineString([(0.0, lo), (width, lo)]),
        LineString([(0.0, hi), (width, hi)]),
        width,
        f"annulus {inner}<|z|<{outer}",
    )


def conductor_from_planar_set(planar_set) -> ConductorDomain:
    """Outer loop at potential 1, the single hole at potential 0."""
    if len(planar_set.holes) != 1:
        raise PreconditionError("a conductor needs exactly two boundary components", hypothesis="doubly connected")
    outer = [(z.real, z.imag) for z in planar_set.outer]
    hole = [(z.real, z.imag) for z in planar_set.holes[0]]
    region = ShapelyPolygon(outer, [hole])
    return ConductorDomain(region, region.interiors[0], region.exterior, None, "planar set")


def _grid_error(reason: str) -> PreconditionError:
    return PreconditionError(f"grid too coarse to separate boundaries: {reason}", hypothesis="grid resolves boundaries")


def annulus_modulus_numeric(domain: ConductorDomain, grid_h: Optional[float] = None) -> ModulusReport:
    """
    Modulus of a planar annulus from a five-point Laplacian.

    Potentials 0 and 1 are snapped to the two boundary components; modulus = 1/energy.

    Args:
        domain: Annular region with its inner and outer boundaries
        grid_h: Grid spacing; MODULUS_CONFIG grid_divisions across the larger side when None

    Returns:
        ModulusReport: modulus, Dirichlet energy and grid size

    Raises:
        PreconditionError: the grid cannot separate the two boundaries
    """
    minx, miny, maxx, maxy = domain.region.bounds
    width, height = maxx - minx, maxy - miny
    if grid_h is None:
        grid_h = max(width, height) / MODULUS_CONFIG["grid_divisions"]
    nx, ny = max(1, math.ceil(width / grid_h)), max(1, math.ceil(height / grid_h))
    hx, hy = width / nx, height / ny
    periodic = domain.period is not None
    cols = nx if periodic else nx + 1

    ii, jj = np.meshgrid(np.arange(cols), np.arange(ny + 1), indexing="ij")
    xs, ys = minx + ii.ravel() * hx, miny + jj.ravel() * hy
    region = domain.region
    if periodic:
        region = unary_union([region, affinity.translate(region, domain.period), affinity.translate(region, -domain.period)])
    slack = 1e-9 * max(width, height)
    inside = shapely.contains_xy(region.buffer(slack), xs, ys)
    points = shapely.points(xs, ys)
    snap = 0.5 * min(hx, hy) + slack
    zero = inside & (shapely.distance(domain.zero, points) <= snap)
    one = inside & (shapely.distance(domain.one, points) <= snap)
    if not zero.any() or not one.any():
        raise _grid_error("a boundary component received no grid node")
    if (zero & one).any():
        raise _grid_error("a node lies within half a cell of both components")

    index = ii.ravel() * (ny + 1) + jj.ravel()
    node_id = np.full(cols * (ny + 1), -1)
    node_id[index[inside]] = np.arange(int(inside.sum()))

    def node(i, j):
        return node_id[(i % cols) * (ny + 1) + j]

    src, dst, weight = [], [], []
    for (di, dj), (dual_len, edge_len) in (((1, 0), (hy, hx)), ((0, 1), (hx, hy))):
        last_i = cols if periodic or di == 0 else cols - 1
        last_j = ny + 1 - dj
        for i in range(last_i):
            a_ids = node_id[i * (ny + 1): i * (ny + 1) + last_j]
            b_ids = np.array([node(i + di, j + dj) for j in range(last_j)])
            ok = (a_ids >= 0) & (b_ids >= 0)
            if not ok.any():
                continue
            js = np.nonzero(ok)[0]
            mx = minx + (i + 0.5 * di) * hx
            my = miny + (js + 0.5 * dj) * hy
            if di:
                ends = (np.full_like(my, mx), my - 0.5 * hy, np.full_like(my, mx), my + 0.5 * hy)
            else:
                ends = (np.full_like(my, mx - 0.5 * hx), my, np.full_like(my, mx + 0.5 * hx), my)
            full = shapely.contains_xy(region, ends[0], ends[1]) & shapely.contains_xy(region, ends[2], ends[3])
            lengths = np.full(len(js), dual_len)
            partial = np.nonzero(~full)[0]
            if len(partial):
                duals = shapely.linestrings(
                    np.stack([np.stack([ends[0][partial], ends[1][partial]], -1), np.stack([ends[2][partial], ends[3][partial]], -1)], 1)
                )
                lengths[partial] = shapely.length(shapely.intersection(region, duals))
            src.append(a_ids[js])
            dst.append(b_ids[js])
            weight.append(lengths / edge_len)
    src, dst, weight = np.concatenate(src), np.concatenate(dst), np.concatenate(weight)

    n = int(inside.sum())
    value = np.full(n, np.nan)
    value[node_id[index[zero]]] = 0.0
    value[node_id[index[one]]] = 1.0
    fixed = ~np.isnan(value)
    if np.any(fixed[src] & fixed[dst] & (value[src] != value[dst]) & (weight > 0)):
        raise _grid_error("a grid edge joins the two components directly")
    free = np.nonzero(~fixed)[0]
    if len(free) == 0:
        raise _grid_error("no free nodes")

    W = coo_matrix((np.concatenate([weight, weight]), (np.concatenate([src, dst]), np.concatenate([dst, src]))), shape=(n, n)).tocsr()
    L = (coo_matrix((np.asarray(W.sum(axis=1)).ravel(), (np.arange(n), np.arange(n))), shape=(n, n)) - W).tocsr()
    fixed_ids = np.nonzero(fixed)[0]
    rhs = -L[free][:, fixed_ids] @ value[fixed_ids]
    value[free] = spsolve(L[free][:, free].tocsc(), rhs)
    energy = float(np.sum(weight * (value[src] - value[dst]) ** 2))
    logger.debug("modulus grid %dx%d, %d nodes, energy %.6g", nx, ny, n, energy)
    return ModulusReport(1.0 / energy, energy, grid_h, n, domain.label)
