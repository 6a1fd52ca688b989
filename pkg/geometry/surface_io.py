"""
Text formats for surfaces, planar sets and curve families
Location: geometry/surface_io.py

Surface files (.hts), UTF-8, one directive per line, '#' starts a comment:

    polygon <name>
    <x> <y>                      one line per vertex, counterclockwise
    pair <name>.<i> <name>.<j> sign=<+1|-1>
    boundary <name>.<i> <horizontal|free>
    mark <puncture|cone|plain> <name> <x> <y> [label]

Planar set files (.poly) hold `loop outer|hole` blocks of vertex lines; curve
files (.curve) hold `curve <name>` blocks.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from config import SURFACE_FORMAT
from geometry.errors import PreconditionError, StructuralError, SurfaceParseError
from geometry.surface_core import (
    BOUNDARY_KINDS,
    MARK_ROLES,
    BoundaryEdge,
    EdgeRef,
    HalfTranslationSurface,
    MarkedPoint,
    Pairing,
    Polygon,
    SurfacePoint,
    validate_surface,
)
from utils.logger import get_logger

logger = get_logger(__name__)

_TOKEN = re.compile(r"\S+")
_EDGE = re.compile(r"^(?P<name>[^.\s]+)\.(?P<index>\d+)$")
_SIGN = re.compile(r"^sign=(?P<sign>[+-]?1)$")

Token = Tuple[str, int]  # text, 1-based column


# ============= TOKENIZING =============

def _tokenize(text: str) -> List[Tuple[int, List[Token]]]:
    comment = SURFACE_FORMAT["comment_prefix"]
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split(comment, 1)[0].replace("−", "-")
        tokens = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(body)]
        if tokens:
            lines.append((number, tokens))
    return lines


def _number(token: Token, line: int) -> float:
    text, column = token
    try:
        return float(text)
    except ValueError:
        raise SurfaceParseError(f"expected a number, found {text!r}", line, column) from None


def _point(tokens: List[Token], line: int) -> complex:
    if len(tokens) != 2:
        column = tokens[2][1] if len(tokens) > 2 else tokens[0][1]
        raise SurfaceParseError("vertex lines hold exactly two numbers", line, column)
    return complex(_number(tokens[0], line), _number(tokens[1], line))


# ============= SURFACES =============

def parse_surface_text(text: str, validate: bool = True) -> HalfTranslationSurface:
    """Parse the surface grammar; with validate=True a failing surface raises StructuralError."""
    names: Dict[str, int] = {}
    vertices: List[List[complex]] = []
    polygon_names: List[str] = []
    directives: List[Tuple[int, List[Token]]] = []
    current: Optional[int] = None

    for line, tokens in _tokenize(text):
        keyword = tokens[0][0]
        if keyword == "polygon":
            if len(tokens) != 2:
                raise SurfaceParseError("usage: polygon <name>", line, tokens[0][1])
            name = tokens[1][0]
            if name in names:
                raise SurfaceParseError(f"polygon {name!r} defined twice", line, tokens[1][1])
            names[name] = len(vertices)
            polygon_names.append(name)
            vertices.append([])
            current = names[name]
        elif keyword in ("pair", "boundary", "mark"):
            current = None
            directives.append((line, tokens))
        else:
            if current is None:
                raise SurfaceParseError(f"unexpected token {keyword!r}", line, tokens[0][1])
            vertices[current].append(_point(tokens, line))

    polygons = [Polygon(tuple(vs), name) for vs, name in zip(vertices, polygon_names)]

    def edge(token: Token, line: int) -> EdgeRef:
        match = _EDGE.match(token[0])
        if not match:
            raise SurfaceParseError(f"expected <polygon>.<edge>, found {token[0]!r}", line, token[1])
        name, index = match.group("name"), int(match.group("index"))
        if name not in names:
            raise SurfaceParseError(f"unknown polygon {name!r}", line, token[1])
        pid = names[name]
        if index >= polygons[pid].n:
            raise SurfaceParseError(f"edge {token[0]} does not exist", line, token[1])
        return EdgeRef(pid, index)

    pairings: List[Pairing] = []
    boundary: List[BoundaryEdge] = []
    marks: List[MarkedPoint] = []
    for line, tokens in directives:
        keyword = tokens[0][0]
        if keyword == "pair":
            if len(tokens) != 4:
                raise SurfaceParseError("usage: pair <name>.<i> <name>.<j> sign=<+1|-1>", line, tokens[0][1])
            sign = _SIGN.match(tokens[3][0])
            if not sign:
                raise SurfaceParseError(f"expected sign=+1 or sign=-1, found {tokens[3][0]!r}", line, tokens[3][1])
            pairings.append(Pairing(edge(tokens[1], line), edge(tokens[2], line), int(sign.group("sign"))))
        elif keyword == "boundary":
            if len(tokens) != 3:
                raise SurfaceParseError("usage: boundary <name>.<i> <horizontal|free>", line, tokens[0][1])
            if tokens[2][0] not in BOUNDARY_KINDS:
                raise SurfaceParseError(f"unknown boundary kind {tokens[2][0]!r}", line, tokens[2][1])
            boundary.append(BoundaryEdge(edge(tokens[1], line), tokens[2][0]))
        else:
            if len(tokens) not in (5, 6):
                raise SurfaceParseError("usage: mark <role> <name> <x> <y> [label]", line, tokens[0][1])
            role, polygon = tokens[1], tokens[2]
            if role[0] not in MARK_ROLES:
                raise SurfaceParseError(f"unknown mark role {role[0]!r}", line, role[1])
            if polygon[0] not in names:
                raise SurfaceParseError(f"unknown polygon {polygon[0]!r}", line, polygon[1])
            position = complex(_number(tokens[3], line), _number(tokens[4], line))
            label = tokens[5][0] if len(tokens) == 6 else ""
            marks.append(MarkedPoint(SurfacePoint(names[polygon[0]], position), role[0], label))

    surface = HalfTranslationSurface(tuple(polygons), tuple(pairings), tuple(boundary), tuple(marks))
    if validate:
        report = validate_surface(surface)
        if not report.passed:
            failure = report.failures[0]
            elements = ", ".join(_describe(surface, e) for e in failure["elements"])
            raise StructuralError(f"{failure['invariant']}: {failure['message']} [{elements}]")
    logger.debug("parsed surface with %d polygons", len(polygons))
    return surface


def _describe(s: HalfTranslationSurface, element: str) -> str:
    """Turn '2.3' edge ids into 'name.3' when the polygon is named."""
    match = re.match(r"^(\d+)\.(\d+)$", element)
    if match:
        pid = int(match.group(1))
        if 0 <= pid < len(s.polygons) and s.polygons[pid].name:
            return f"{s.polygons[pid].name}.{match.group(2)}"
    return element


def parse_surface_file(path: Union[str, Path], validate: bool = True) -> HalfTranslationSurface:
    return parse_surface_text(Path(path).read_text(encoding="utf-8"), validate=validate)


def _names(s: HalfTranslationSurface) -> List[str]:
    used, names = set(), []
    for pid, poly in enumerate(s.polygons):
        name = poly.name if poly.name and poly.name not in used and re.match(r"^[^.\s#]+$", poly.name) else f"P{pid}"
        while name in used:
            name = f"{name}_{pid}"
        used.add(name)
        names.append(name)
    return names


def serialize_surface(s: HalfTranslationSurface) -> str:
    """Inverse of parse_surface_text; floats use repr so values round-trip exactly."""
    names = _names(s)
    out: List[str] = []
    for name, poly in zip(names, s.polygons):
        out.append(f"polygon {name}")
        out.extend(f"{v.real!r} {v.imag!r}" for v in poly.vertices)
    for p in s.pairings:
        out.append(
            f"pair {names[p.a.polygon_id]}.{p.a.edge_index} "
            f"{names[p.b.polygon_id]}.{p.b.edge_index} sign={p.sign:+d}"
        )
    for b in s.boundary:
        out.append(f"boundary {names[b.edge.polygon_id]}.{b.edge.edge_index} {b.kind}")
    for m in s.marked_points:
        line = f"mark {m.role} {names[m.point.polygon_id]} {m.point.position.real!r} {m.point.position.imag!r}"
        out.append(f"{line} {m.name}" if m.name else line)
    return "\n".join(out) + "\n"


def write_surface_file(s: HalfTranslationSurface, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_surface(s), encoding="utf-8")
    return path


# ============= PLANAR SETS AND CURVES =============

def parse_loops_text(text: str, header: str) -> List[Tuple[str, List[complex], int]]:
    """Blocks introduced by `<header> <label>`; returns (label, points, line)."""
    blocks: List[Tuple[str, List[complex], int]] = []
    for line, tokens in _tokenize(text):
        if tokens[0][0] == header:
            if len(tokens) != 2:
                raise SurfaceParseError(f"usage: {header} <label>", line, tokens[0][1])
            blocks.append((tokens[1][0], [], line))
        else:
            if not blocks:
                raise SurfaceParseError(f"vertex before any {header} line", line, tokens[0][1])
            blocks[-1][1].append(_point(tokens, line))
    for label, points, line in blocks:
        if len(points) < 3:
            raise SurfaceParseError(f"{header} {label!r} needs at least 3 points", line, 1)
    return blocks


def parse_planar_set_file(path: Union[str, Path]):
    from geometry.semismooth import PlanarSet

    blocks = parse_loops_text(Path(path).read_text(encoding="utf-8"), "loop")
    outer = [pts for label, pts, _ in blocks if label == "outer"]
    holes = [pts for label, pts, _ in blocks if label == "hole"]
    bad = [(label, line) for label, _, line in blocks if label not in ("outer", "hole")]
    if bad:
        raise SurfaceParseError(f"loop kind must be outer or hole, found {bad[0][0]!r}", bad[0][1], 6)
    if len(outer) != 1:
        raise SurfaceParseError(f"expected exactly one outer loop, found {len(outer)}", 1, 1)
    return PlanarSet(tuple(outer[0]), tuple(tuple(h) for h in holes))


def parse_curve_file(path: Union[str, Path]):
    """Return (curves in file order, limit curve or None); a block named 'limit' is the limit."""
    from geometry.semismooth import ClosedCurve

    curves, limit = [], None
    for label, points, _ in parse_loops_text(Path(path).read_text(encoding="utf-8"), "curve"):
        curve = ClosedCurve.from_points(points)
        if label == "limit":
            limit = curve
        else:
            curves.append(curve)
    return curves, limit


# ============= COMMAND-LINE REFERENCES =============

def _polygon_ref(s: HalfTranslationSurface, ref: str) -> int:
    try:
        return s.polygon_index(ref)
    except KeyError:
        if ref.isdigit() and int(ref) < len(s.polygons):
            return int(ref)
        raise PreconditionError(f"no polygon {ref!r}", hypothesis="known polygon") from None


def point_from_spec(s: HalfTranslationSurface, spec) -> SurfacePoint:
    """`<polygon>:<x>,<y>` with the polygon given by name or index."""
    if isinstance(spec, SurfacePoint):
        return spec
    ref, sep, coords = str(spec).partition(":")
    parts = coords.split(",")
    if not sep or len(parts) != 2:
        raise PreconditionError(f"point {spec!r} is not of the form polygon:x,y", hypothesis="point syntax")
    try:
        x, y = float(parts[0]), float(parts[1])
    except ValueError:
        raise PreconditionError(f"point {spec!r} has non-numeric coordinates", hypothesis="point syntax") from None
    pid = _polygon_ref(s, ref)
    z = complex(x, y)
    if not s.polygons[pid].contains(z):
        raise PreconditionError(f"point {spec!r} is outside polygon {ref}", hypothesis="point in polygon")
    return SurfacePoint(pid, z)


def edge_from_spec(s: HalfTranslationSurface, spec) -> EdgeRef:
    """`<polygon>.<i>`, the same notation as surface files."""
    if isinstance(spec, EdgeRef):
        return spec
    match = _EDGE.match(str(spec))
    if not match:
        raise PreconditionError(f"edge {spec!r} is not of the form polygon.index", hypothesis="edge syntax")
    pid = _polygon_ref(s, match.group("name"))
    index = int(match.group("index"))
    if index >= s.polygons[pid].n:
        raise PreconditionError(f"polygon {match.group('name')} has no edge {index}", hypothesis="edge syntax")
    return EdgeRef(pid, index)


def edge_path_from_spec(s: HalfTranslationSurface, spec) -> Tuple[EdgeRef, ...]:
    """Comma-separated edges, e.g. `L.0,R.0`."""
    if isinstance(spec, (list, tuple)):
        return tuple(edge_from_spec(s, e) for e in spec)
    return tuple(edge_from_spec(s, e) for e in str(spec).split(",") if e)
