"""
Piecewise-affine quasiconformal maps between flat surfaces
Location: geometry/qc_maps.py

A map is affine on every face of its domain: w = M z + b, with M a real 2x2
matrix acting on (x, y). Dilatation, Beltrami coefficients and the
Teichmuller-embedding predicate are all per-face linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from shapely import affinity
from shapely.geometry import LineString
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.ops import linemerge, unary_union

from config import QC_CONFIG, TOLERANCE_CONFIG
from geometry.errors import PreconditionError, StructuralError
from geometry.surface_core import (
    FREE,
    INTERIOR,
    BoundaryEdge,
    EdgeRef,
    HalfTranslationSurface,
    Isometry,
    MarkedPoint,
    Pairing,
    Polygon,
    SurfacePoint,
    area,
)
from utils.logger import get_logger

logger = get_logger(__name__)

TOL = TOLERANCE_CONFIG["exact"]
MATRIX_TOL = QC_CONFIG["matrix_tolerance"]


# ============= LINEAR ALGEBRA =============

def apply_matrix(M: np.ndarray, z: complex) -> complex:
    return complex(M[0, 0] * z.real + M[0, 1] * z.imag, M[1, 0] * z.real + M[1, 1] * z.imag)


def matrix_dilatation(M: np.ndarray) -> float:
    """Singular-value ratio; equals |A|^2 / det A for orientation-preserving A."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    return float(s[0] / s[1])


def complex_derivatives(M: np.ndarray) -> Tuple[complex, complex]:
    """(df/dz, df/dzbar) of the affine map with linear part M."""
    p, q, r, s = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    return complex(0.5 * (p + s), 0.5 * (r - q)), complex(0.5 * (p - s), 0.5 * (r + q))


def affine_from_points(src: Sequence[complex], dst: Sequence[complex]) -> Tuple[np.ndarray, complex]:
    """Affine map sending the first three (non-collinear) source points to the targets."""
    u = np.array([[(src[k] - src[0]).real for k in (1, 2)], [(src[k] - src[0]).imag for k in (1, 2)]])
    w = np.array([[(dst[k] - dst[0]).real for k in (1, 2)], [(dst[k] - dst[0]).imag for k in (1, 2)]])
    M = w @ np.linalg.inv(u)
    return M, complex(dst[0]) - apply_matrix(M, complex(src[0]))


def _spread_triple(vertices: Sequence[complex]) -> Tuple[int, int, int]:
    """Indices of three vertices spanning the largest triangle."""
    n = len(vertices)
    best, triple = -1.0, (0, 1, 2)
    for k in range(2, n):
        for j in range(1, k):
            a = abs(((vertices[j] - vertices[0]).conjugate() * (vertices[k] - vertices[0])).imag)
            if a > best:
                best, triple = a, (0, j, k)
    return triple


# ============= MAP TYPE =============

@dataclass(frozen=True, eq=False)
class PiecewiseAffineMap:
    domain: HalfTranslationSurface
    codomain: HalfTranslationSurface
    matrices: np.ndarray  # (faces, 2, 2)
    translations: np.ndarray  # (faces,) complex
    face_map: Tuple[int, ...]

    @property
    def faces(self) -> int:
        return len(self.domain.polygons)

    def apply(self, face: int, z: complex) -> complex:
        return apply_matrix(self.matrices[face], z) + complex(self.translations[face])

    def image_vertices(self, face: int) -> Tuple[complex, ...]:
        return tuple(self.apply(face, v) for v in self.domain.polygons[face].vertices)

    def to_dict(self) -> Dict:
        return {
            "faces": [
                {
                    "matrix": self.matrices[k].tolist(),
                    "translation": [complex(self.translations[k]).real, complex(self.translations[k]).imag],
                    "codomain_face": self.face_map[k],
                }
                for k in range(self.faces)
            ]
        }


@dataclass(frozen=True)
class BeltramiDatum:
    mu: Tuple[complex, ...]

    @property
    def max_modulus(self) -> float:
        return max((abs(m) for m in self.mu), default=0.0)

    def to_dict(self) -> Dict:
        return {"mu": [[m.real, m.imag] for m in self.mu], "max_modulus": self.max_modulus}


@dataclass(frozen=True)
class EmbeddingReport:
    passed: bool
    matrices_ok: bool
    complement_area: float
    overlap_area: float
    escaped_area: float
    complement_segments: Tuple[Tuple[int, Tuple[Tuple[float, float], ...]], ...]
    horizontal: bool
    tolerance: float

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "matrices_ok": self.matrices_ok,
            "complement_area": self.complement_area,
            "overlap_area": self.overlap_area,
            "escaped_area": self.escaped_area,
            "complement_segments": [
                {"polygon_id": pid, "points": [list(p) for p in pts]} for pid, pts in self.complement_segments
            ],
            "horizontal": self.horizontal,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class PushPointReport:
    map: PiecewiseAffineMap
    dilatation: float
    center_image: complex
    ring_size: int
    inner_radius: float

    def to_dict(self) -> Dict:
        return {
            "dilatation": self.dilatation,
            "center_image": [self.center_image.real, self.center_image.imag],
            "ring_size": self.ring_size,
            "inner_radius": self.inner_radius,
            "faces": self.map.faces,
        }


# ============= BUILDING MAPS =============

def _pairing_sign(va: complex, vb: complex, scale: float) -> Optional[int]:
    if abs(vb + va) <= MATRIX_TOL * scale:
        return 1
    if abs(vb - va) <= MATRIX_TOL * scale:
        return -1
    return None


def image_surface(domain: HalfTranslationSurface, images: Sequence[Sequence[complex]]) -> HalfTranslationSurface:
    """Polygons moved to new vertex positions, glued along the same edges."""
    polygons = tuple(Polygon(tuple(img), poly.name) for poly, img in zip(domain.polygons, images))
    scale = max(1.0, max(abs(v) for poly in polygons for v in poly.vertices))
    pairings = []
    for p in domain.pairings:
        va = polygons[p.a.polygon_id].edge_vector(p.a.edge_index)
        vb = polygons[p.b.polygon_id].edge_vector(p.b.edge_index)
        sign = _pairing_sign(va, vb, scale)
        if sign is None:
            raise StructuralError(f"images of glued edges {p.a} and {p.b} do not match")
        pairings.append(Pairing(p.a, p.b, sign))
    return HalfTranslationSurface(polygons, tuple(pairings), domain.boundary)


def piecewise_linear_map(
    domain: HalfTranslationSurface,
    images: Sequence[Sequence[complex]],
    codomain: Optional[HalfTranslationSurface] = None,
    face_map: Optional[Sequence[int]] = None,
) -> PiecewiseAffineMap:
    """Face-wise affine map from vertex images; the codomain defaults to the glued image polygons."""
    matrices, translations = [], []
    for k, (poly, img) in enumerate(zip(domain.polygons, images)):
        if len(img) != poly.n:
            raise PreconditionError(f"face {k} needs {poly.n} vertex images", hypothesis="vertex images")
        i, j, l = _spread_triple(poly.vertices)
        M, b = affine_from_points([poly.vertex(i), poly.vertex(j), poly.vertex(l)], [img[i], img[j], img[l]])
        if np.linalg.det(M) <= 0:
            raise PreconditionError(f"map reverses orientation on face {k}", hypothesis="det>0")
        for v, w in zip(poly.vertices, img):
            if abs(apply_matrix(M, v) + b - w) > MATRIX_TOL * max(1.0, abs(w)):
                raise PreconditionError(f"vertex images of face {k} are not affine", hypothesis="affine face")
        matrices.append(M)
        translations.append(b)
    if codomain is None:
        codomain = image_surface(domain, images)
    face_map = tuple(range(len(domain.polygons))) if face_map is None else tuple(face_map)
    return PiecewiseAffineMap(domain, codomain, np.array(matrices), np.array(translations, dtype=complex), face_map)


def linear_map(s: HalfTranslationSurface, matrix) -> PiecewiseAffineMap:
    """One linear map applied in every chart; gluings stay of the form +-z + c."""
    M = np.asarray(matrix, dtype=float)
    images = [[apply_matrix(M, v) for v in poly.vertices] for poly in s.polygons]
    m = piecewise_linear_map(s, images)
    marks = tuple(
        MarkedPoint(SurfacePoint(mk.point.polygon_id, apply_matrix(M, mk.point.position)), mk.role, mk.name)
        for mk in s.marked_points
    )
    codomain = HalfTranslationSurface(m.codomain.polygons, m.codomain.pairings, m.codomain.boundary, marks)
    return PiecewiseAffineMap(s, codomain, m.matrices, m.translations, m.face_map)


def identity_map(s: HalfTranslationSurface) -> PiecewiseAffineMap:
    faces = len(s.polygons)
    return PiecewiseAffineMap(s, s, np.tile(np.eye(2), (faces, 1, 1)), np.zeros(faces, dtype=complex), tuple(range(faces)))


def stretch_map(
    s: HalfTranslationSurface, K: float, allow_compression: bool = False
) -> Tuple[HalfTranslationSurface, PiecewiseAffineMap]:
    """
    Teichmuller stretch x + iy -> Kx + iy in every natural chart.

    Args:
        s: Surface to stretch
        K: Horizontal stretch factor
        allow_compression: Accept 0 < K < 1

    Returns:
        Tuple: the stretched surface and the face-wise map onto it
    """
    if K <= 0 or (K < 1 and not allow_compression):
        raise PreconditionError(f"stretch factor K={K} must be at least 1", hypothesis="K>=1")
    m = linear_map(s, [[K, 0.0], [0.0, 1.0]])
    logger.debug("stretched %d polygons by K=%s", len(s.polygons), K)
    return m.codomain, m


def compose_maps(outer: PiecewiseAffineMap, inner: PiecewiseAffineMap) -> PiecewiseAffineMap:
    """outer after inner; inner's face images must lie in outer's domain faces."""
    if len(outer.domain.polygons) != len(inner.codomain.polygons):
        raise PreconditionError("maps are not composable", hypothesis="composable")
    matrices, translations, face_map = [], [], []
    for k in range(inner.faces):
        j = inner.face_map[k]
        matrices.append(outer.matrices[j] @ inner.matrices[k])
        translations.append(apply_matrix(outer.matrices[j], complex(inner.translations[k])) + complex(outer.translations[j]))
        face_map.append(outer.face_map[j])
    return PiecewiseAffineMap(inner.domain, outer.codomain, np.array(matrices), np.array(translations, dtype=complex), tuple(face_map))


def inclusion_map(domain: HalfTranslationSurface, codomain: HalfTranslationSurface) -> PiecewiseAffineMap:
    """Identity in coordinates; each domain face goes to the codomain polygon covering it."""
    face_map = []
    for k, poly in enumerate(domain.polygons):
        inside = poly.to_shapely().representative_point()
        target = next(
            (q for q, cpoly in enumerate(codomain.polygons) if cpoly.to_shapely().buffer(TOL).covers(inside)), None
        )
        if target is None:
            raise PreconditionError(f"face {k} lies in no codomain polygon", hypothesis="inclusion")
        face_map.append(target)
    faces = len(domain.polygons)
    return PiecewiseAffineMap(domain, codomain, np.tile(np.eye(2), (faces, 1, 1)), np.zeros(faces, dtype=complex), tuple(face_map))


def translation_map(
    domain: HalfTranslationSurface, codomain: HalfTranslationSurface, shift: complex, face_map: Sequence[int]
) -> PiecewiseAffineMap:
    faces = len(domain.polygons)
    return PiecewiseAffineMap(
        domain, codomain, np.tile(np.eye(2), (faces, 1, 1)), np.full(faces, complex(shift)), tuple(face_map)
    )


def mesh_surface(
    points: Sequence[complex], triangles: Sequence[Tuple[int, int, int]], boundary_kind: str = FREE
) -> HalfTranslationSurface:
    """Planar triangle mesh as a surface: shared edges glued by translation, the rest boundary."""
    polygons = tuple(Polygon(tuple(points[i] for i in tri), f"t{k}") for k, tri in enumerate(triangles))
    owner: Dict[Tuple[int, int], EdgeRef] = {}
    for k, tri in enumerate(triangles):
        for j in range(3):
            owner[(tri[j], tri[(j + 1) % 3])] = EdgeRef(k, j)
    pairings, boundary = [], []
    for (u, v), e in sorted(owner.items(), key=lambda item: item[1]):
        twin = owner.get((v, u))
        if twin is None:
            boundary.append(BoundaryEdge(e, boundary_kind))
        elif e < twin:
            pairings.append(Pairing(e, twin, 1))
    return HalfTranslationSurface(polygons, tuple(pairings), tuple(boundary))


def _corner_signs(s: HalfTranslationSurface, cycle) -> Tuple[List[int], int]:
    """Chart signs of each corner relative to the first, and the holonomy sign around the cycle."""
    signs = [1]
    for corner in cycle.corners[:-1]:
        n = s.polygons[corner.polygon_id].n
        _, sign = s.partner(EdgeRef(corner.polygon_id, (corner.vertex_index - 1) % n))
        signs.append(signs[-1] * sign)
    holonomy = signs[-1]
    if cycle.location == INTERIOR:
        last = cycle.corners[-1]
        n = s.polygons[last.polygon_id].n
        holonomy *= s.partner(EdgeRef(last.polygon_id, (last.vertex_index - 1) % n))[1]
    return signs, holonomy


def vertex_perturbation_map(
    s: HalfTranslationSurface, amplitude: float, rng: np.random.Generator
) -> PiecewiseAffineMap:
    """Random face-wise affine self-map moving regular vertices; cone points and their images stay fixed.

    Horizontal boundary vertices slide horizontally only. Requires a triangulated surface.
    """
    if any(p.n != 3 for p in s.polygons):
        raise PreconditionError("vertex perturbations need a triangulated surface", hypothesis="triangles")
    images = [list(poly.vertices) for poly in s.polygons]
    for cycle in s.vertex_cycles:
        signs, holonomy = _corner_signs(s, cycle)
        regular = 2 if cycle.location == INTERIOR else 1
        if holonomy != 1 or abs(cycle.total_angle - regular * math.pi) > TOL:
            continue
        delta = complex(*rng.uniform(-amplitude, amplitude, size=2))
        if cycle.location != INTERIOR:
            delta = complex(delta.real, 0.0)
        for corner, sign in zip(cycle.corners, signs):
            images[corner.polygon_id][corner.vertex_index] += sign * delta
    return piecewise_linear_map(s, images)


# ============= DILATATION AND BELTRAMI =============

def face_dilatations(m: PiecewiseAffineMap) -> np.ndarray:
    s = np.linalg.svd(m.matrices, compute_uv=False)
    return s[:, 0] / s[:, 1]


def dilatation_of(m: PiecewiseAffineMap) -> float:
    return float(np.max(face_dilatations(m)))


def beltrami_of(m: PiecewiseAffineMap) -> BeltramiDatum:
    mu = []
    for k in range(m.faces):
        dz, dzbar = complex_derivatives(m.matrices[k])
        if abs(dz) <= MATRIX_TOL:
            raise PreconditionError(f"df/dz vanishes on face {k}", hypothesis="df/dz != 0")
        mu.append(dzbar / dz)
    return BeltramiDatum(tuple(mu))


# ============= TEICHMULLER EMBEDDINGS =============

def _measure(g) -> float:
    return g.area if g.area > 0 else g.length


def _move(g, phi: Isometry):
    return affinity.affine_transform(g, [phi.sign, 0, 0, phi.sign, phi.shift.real, phi.shift.imag])


def _outer_slab(poly: Polygon, i: int, reach: float) -> ShapelyPolygon:
    a, b = poly.edge_endpoints(i)
    outward = -1j * (b - a) / abs(b - a) * reach
    return ShapelyPolygon([(z.real, z.imag) for z in (a, b, b + outward, a + outward)])


def fold_into_codomain(codomain: HalfTranslationSurface, qid: int, geom, depth: int = 0) -> List[Tuple[Optional[int], object]]:
    """Split a shape drawn in polygon qid's chart into per-polygon pieces, following gluings.

    Pieces crossing the boundary come back with polygon None.
    """
    poly = codomain.polygons[qid]
    shape = poly.to_shapely()
    pieces: List[Tuple[Optional[int], object]] = []
    inside = geom.intersection(shape)
    if not inside.is_empty and _measure(inside) > 0:
        pieces.append((qid, inside))
    rest = geom.difference(shape)
    if rest.is_empty or _measure(rest) <= TOL ** 2 or depth >= 4:
        return pieces
    reach = 4 * max(abs(a - b) for a in poly.vertices for b in poly.vertices) + 4 * rest.length
    for i in range(poly.n):
        part = rest.intersection(_outer_slab(poly, i, reach))
        if part.is_empty or _measure(part) <= TOL ** 2:
            continue
        e = EdgeRef(qid, i)
        if codomain.is_boundary(e):
            pieces.append((None, part))
            continue
        f, phi = codomain.gluing_map(e)
        pieces.extend(fold_into_codomain(codomain, f.polygon_id, _move(part, phi), depth + 1))
    return pieces


def _segments(geom) -> List[Tuple[Tuple[float, float], ...]]:
    if geom.is_empty:
        return []
    if geom.geom_type == "LineString":
        return [tuple(geom.coords)]
    return [seg for part in getattr(geom, "geoms", []) for seg in _segments(part)]


def teichmuller_embedding_check(m: PiecewiseAffineMap, K: float) -> EmbeddingReport:
    """Every face matrix is +-diag(K, 1) and the image misses only points and horizontal arcs."""
    target = np.array([[K, 0.0], [0.0, 1.0]])
    matrices_ok = all(
        min(np.max(np.abs(M - target)), np.max(np.abs(M + target))) <= MATRIX_TOL for M in m.matrices
    )
    Y = m.codomain
    tol = TOLERANCE_CONFIG["verdict_slack"] * max(1.0, area(Y))

    faces: Dict[int, List] = {q: [] for q in range(len(Y.polygons))}
    escaped = 0.0
    for k in range(m.faces):
        image = ShapelyPolygon([(w.real, w.imag) for w in m.image_vertices(k)])
        for qid, piece in fold_into_codomain(Y, m.face_map[k], image):
            if qid is None:
                escaped += piece.area
            else:
                faces[qid].append(piece)

    complement_area = overlap_area = 0.0
    for qid, pieces in faces.items():
        union = unary_union(pieces) if pieces else ShapelyPolygon()
        overlap_area += sum(p.area for p in pieces) - union.area
        complement_area += max(0.0, Y.polygons[qid].to_shapely().area - union.area)

    lines: Dict[int, List] = {q: [] for q in range(len(Y.polygons))}
    for e in m.domain.edges():
        if not m.domain.is_boundary(e):
            continue
        a, b = m.domain.edge_endpoints(e)
        wa, wb = m.apply(e.polygon_id, a), m.apply(e.polygon_id, b)
        segment = LineString([(wa.real, wa.imag), (wb.real, wb.imag)])
        for qid, piece in fold_into_codomain(Y, m.face_map[e.polygon_id], segment):
            if qid is not None:
                lines[qid].append(piece)

    complement: List[Tuple[int, Tuple[Tuple[float, float], ...]]] = []
    for qid, pieces in lines.items():
        if not pieces:
            continue
        poly = Y.polygons[qid]
        rim = [
            LineString([(z.real, z.imag) for z in poly.edge_endpoints(i)])
            for i in range(poly.n)
            if Y.is_boundary(EdgeRef(qid, i))
        ]
        merged = unary_union(pieces)
        if rim:
            merged = merged.difference(unary_union(rim).buffer(10 * TOL))
        merged = linemerge(merged) if merged.geom_type == "MultiLineString" else merged
        for seg in _segments(merged):
            if LineString(seg).length > 10 * TOL:
                complement.append((qid, seg))
    horizontal = all(abs(y - seg[0][1]) <= 10 * TOL for _, seg in complement for _, y in seg)
    passed = matrices_ok and complement_area <= tol and overlap_area <= tol and escaped <= tol and horizontal
    return EmbeddingReport(passed, matrices_ok, complement_area, overlap_area, escaped, tuple(complement), horizontal, tol)


# ============= GADGETS =============

def shear_dilatation(b: float) -> float:
    """Closed form for [[1, b], [0, 1]]."""
    return ((2 + b * b) + abs(b) * math.sqrt(4 + b * b)) / 2


def shear_gadget(K: float, delta: float) -> Tuple[np.ndarray, float]:
    """Linear part of the stretch composed with the boundary punch on the lower half-triangle."""
    if K < 1 or delta <= 0:
        raise PreconditionError("shear gadget needs K >= 1 and delta > 0", hypothesis="K>=1, delta>0")
    matrix = np.array([[1.0, (K - 1) * delta], [0.0, 1.0]])
    return matrix, matrix_dilatation(matrix)


def punch_triangle(delta: float) -> HalfTranslationSurface:
    """Isosceles triangle with base [-i, i] and apex delta, split along [0, delta]."""
    points = [-1j, complex(delta, 0), 1j, 0j]
    return mesh_surface(points, [(0, 1, 3), (3, 1, 2)])


def triangle_punch_map(K: float, delta: float) -> PiecewiseAffineMap:
    """Fix the triangle's vertices and push the base midpoint to (1 - 1/K) delta."""
    if K < 1 or delta <= 0:
        raise PreconditionError("punch map needs K >= 1 and delta > 0", hypothesis="K>=1, delta>0")
    domain = punch_triangle(delta)
    moved = complex((1 - 1 / K) * delta, 0)
    images = [[moved if abs(v) <= TOL else v for v in poly.vertices] for poly in domain.polygons]
    return piecewise_linear_map(domain, images)


def disk_mesh(radius: float, ring_size: int, inner_fraction: float) -> Tuple[List[complex], List[Tuple[int, int, int]]]:
    """Center, inner ring and outer ring of a regular polygonal disk."""
    n = ring_size
    points = [0j]
    points += [inner_fraction * radius * complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n)]
    points += [radius * complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n)]
    triangles = []
    for k in range(n):
        i0, i1 = 1 + k, 1 + (k + 1) % n
        o0, o1 = 1 + n + k, 1 + n + (k + 1) % n
        triangles.append((0, i0, i1))
        triangles.append((i0, o0, o1))
        triangles.append((i0, o1, i1))
    return points, triangles


def push_rings(disk_radius: float, displacement: float, ring_size: int, inner_fraction: float) -> Tuple[int, float]:
    """Ring size and inner radius keeping every face of the pushed mesh positively oriented.

    Faces between the rings stay oriented while |d| < (R - r) cos(pi/n), so the
    ring is refined until cos(pi/n) >= (R + |d|) / 2R and the inner radius is
    taken halfway to the folding bound.
    """
    n = ring_size
    half = (disk_radius + displacement) / (2 * disk_radius)
    if math.cos(math.pi / n) < half:
        n = max(n, math.ceil(math.pi / math.acos(half)))
    bound = disk_radius - displacement / math.cos(math.pi / n)
    return n, min(inner_fraction * disk_radius, bound / 2)


def push_point(disk_radius: float, displacement: complex, ring_size: Optional[int] = None) -> PushPointReport:
    """Piecewise-affine disk homeomorphism, identity on the rim, moving the center by `displacement`.

    Args:
        disk_radius: Radius R of the disk.
        displacement: Image of the center, any |d| < R.
        ring_size: Minimum number of points per ring; raised near the rim.

    Returns:
        PushPointReport with the map, its dilatation and the rings used.
    """
    ring_size = ring_size or QC_CONFIG["push_point_ring_size"]
    displacement = complex(displacement)
    if disk_radius <= 0 or abs(displacement) >= disk_radius:
        raise PreconditionError(
            f"displacement {abs(displacement)} must be smaller than the radius {disk_radius}",
            hypothesis="|displacement| < radius",
        )
    ring_size, inner = push_rings(disk_radius, abs(displacement), ring_size, QC_CONFIG["inner_ring_fraction"])
    points, triangles = disk_mesh(disk_radius, ring_size, inner / disk_radius)
    moved = [z + displacement if k <= ring_size else z for k, z in enumerate(points)]
    domain = mesh_surface(points, triangles)
    images = [[moved[i] for i in tri] for tri in triangles]
    m = piecewise_linear_map(domain, images)
    logger.debug("push by %s: %d ring points, inner radius %.6g", displacement, ring_size, inner)
    return PushPointReport(m, dilatation_of(m), displacement, ring_size, inner)
