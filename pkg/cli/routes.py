"""
Subcommand table for the command line
Location: cli/routes.py

Each route names the agent operation it runs and the options it accepts.
Option destinations are the agent input keys, so the parsed namespace goes
to the coordinator unchanged.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from config import CLI_CONFIG


@dataclass(frozen=True)
class Option:
    flags: Tuple[str, ...]
    dest: str
    help: str
    kwargs: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Route:
    help: str
    options: Tuple[Option, ...]


def _opt(flags, dest: str, help: str, **kwargs) -> Option:
    flags = (flags,) if isinstance(flags, str) else tuple(flags)
    return Option(flags, dest, help, kwargs)


# ============= SHARED OPTIONS =============

SURFACE = _opt("--surface", "surface", "surface file (.hts) or corpus name", required=True)
SURFACE_OPTIONAL = _opt("--surface", "surface", "surface file (.hts) or corpus name")
BUDGET = _opt("--budget", "budget", "unfolding or move budget", type=int)
OUT = _opt("--out", "out", "write the resulting surface to this .hts file")
SAMPLES = _opt("--samples", "samples", "sample count", type=int)
ORIENTATION = _opt("--orientation", "orientation", "structure foliation", choices=["horizontal", "vertical"])
CURVES = _opt("--curves", "curves", "curve family name or .curve files", nargs="+", required=True)
LIMIT = _opt("--limit", "limit", ".curve file holding the limit curve")


# ============= SUBCOMMANDS =============

SUBCOMMANDS: Dict[str, Route] = {
    "validate": Route("check surface invariants and list cone points", (SURFACE,)),
    "gaussbonnet": Route("Gauss-Bonnet balance of a surface or of a geodesic polygon", (
        SURFACE,
        _opt("--subdivisions", "subdivisions", "repeat over this many random subdivisions", type=int),
        _opt("--corners", "corners", "corners poly:x,y of a closed geodesic polygon", nargs="+"),
        BUDGET,
    )),
    "geodesic": Route("shortest geodesic between two points", (
        SURFACE,
        _opt("--from", "p", "start point poly:x,y", required=True),
        _opt("--to", "q", "end point poly:x,y", required=True),
        BUDGET,
    )),
    "divergence": Route("quadrilateral divergence inequality", (
        SURFACE,
        _opt("--x0", "x0", "corner poly:x,y", required=True),
        _opt("--x1", "x1", "corner poly:x,y", required=True),
        _opt("--y0", "y0", "corner poly:x,y", required=True),
        _opt("--y1", "y1", "corner poly:x,y", required=True),
        BUDGET,
    )),
    "el": Route("extremal length of the structure foliation", (
        SURFACE,
        ORIENTATION,
        _opt("--K", "K", "also check monotonicity under the stretch with this dilatation", type=float),
        _opt("--refine", "refine", "uniform subdivisions of the foliation rectangles", type=int),
    )),
    "modulus": Route("finite-difference modulus of a doubly connected domain", (
        _opt("--domain", "planar_set", "planar domain (.poly with one hole) or shape name"),
        SURFACE_OPTIONAL,
        _opt("--inner", "inner", "inner radius of a round annulus", type=float),
        _opt("--outer", "outer", "outer radius of a round annulus", type=float),
        _opt("--height", "height", "height of a rectangle conductor", type=float),
        _opt("--width", "width", "width of a rectangle conductor", type=float),
        _opt("--no-periodic", "periodic", "rectangle sides are not identified", action="store_false"),
        _opt("--grid", "grid", "grid divisions across the domain", type=int),
        _opt("--grid-h", "grid_h", "grid spacing", type=float),
    )),
    "height": Route("least transverse measure in a curve class", (
        SURFACE,
        ORIENTATION,
        _opt("--loop", "loop", "points poly:x,y of a closed loop", nargs="+"),
        _opt("--polygon", "polygon", "cross cut of this cylinder polygon", type=int),
        BUDGET,
        _opt("--lenient", "lenient", "return the best value when the budget runs out", action="store_true"),
    )),
    "stretch": Route("Teichmuller stretch x + iy -> Kx + iy", (
        SURFACE,
        _opt("--K", "K", "dilatation", type=float, required=True),
        _opt("--allow-compression", "allow_compression", "accept K < 1", action="store_true"),
        OUT,
    )),
    "dilatation": Route("dilatation of a map, a shear, or the punch gadget", (
        _opt("--map", "map", "map interchange file (.json); needs --surface"),
        SURFACE_OPTIONAL,
        _opt("--matrix", "matrix", "linear map a b c d applied in every chart", type=float, nargs=4),
        _opt("--shear", "shear", "shear parameter b", type=float),
        _opt("--K", "K", "gadget dilatation", type=float),
    )),
    "push": Route("piecewise-affine point push in a round disk", (
        _opt("--radius", "radius", "disk radius", type=float, required=True),
        _opt("--displacement", "displacement", "complex displacement, e.g. 0.1+0.05j", type=complex, required=True),
        _opt("--ring-size", "ring_size", "vertices per ring", type=int),
    )),
    "slit": Route("cut a horizontal slit", (
        SURFACE,
        _opt("--start", "start", "slit start poly:x,y", required=True),
        _opt("--length", "length", "slit length", type=float, required=True),
        _opt("--direction", "direction", "+1 or -1", type=int, choices=[1, -1]),
        OUT,
    )),
    "unfold": Route("prong doubling at slit endpoints", (
        SURFACE,
        _opt("--tip", "tip", "one slit endpoint poly:x,y (default: all)"),
    )),
    "enlarge": Route("glue cylinders of modulus r to every boundary circle", (
        SURFACE,
        _opt("--r", "r", "modulus of the glued cylinders", type=float, required=True),
        OUT,
    )),
    "extension": Route("modulus of extension of C(hX) into C(hY)", (
        _opt("--hx", "hX", "height of the domain cylinder", type=float, required=True),
        _opt("--hy", "hY", "height of the target cylinder", type=float, required=True),
        _opt("--search-tolerance", "search_tolerance", "bisection tolerance", type=float),
    )),
    "cover": Route("double cover with Riemann-Hurwitz check", (
        SURFACE,
        _opt("--branch", "branch", "comma-separated marked punctures", type=lambda s: [b for b in s.split(",") if b]),
        _opt("--arc", "arcs", "cut arc as edges p.i,q.j (repeatable)", action="append"),
        _opt("--loop", "loops", "closed cut loop as edges (repeatable)", action="append"),
        OUT,
    )),
    "flow": Route("horizontal flow family of a slit cylinder", (
        SURFACE,
        _opt("--codomain", "codomain", "enclosing cylinder (default: from the vertex bounds)"),
        _opt("--t", "t", "flow time (default: sample the admissible range)", type=float),
        SAMPLES,
    )),
    "grunsky": Route("Grunsky disk check with Koebe boundary values", (
        _opt("--z", "z", "point of the unit disk", type=complex, required=True),
        SAMPLES,
    )),
    "residue": Route("residue pairing, quadrature and sector scan", (
        _opt("--location", "location", "pole location", type=complex),
        _opt("--c", "c", "coefficient of the simple pole", type=complex),
        _opt("--v", "v", "direction (default: the vertical direction)", type=complex),
        _opt("--rho1", "rho1", "inner radius of the cutoff ramp", type=float),
        _opt("--rho2", "rho2", "outer radius of the cutoff ramp", type=float),
        _opt("--resolution", "resolution", "quadrature grid per side", type=int),
        _opt("--angles", "angles", "sector scan angles", type=int),
    )),
    "blob-cylinder": Route("inner and outer estimates of a cylinder blob", (
        _opt("--hx", "hX", "height of the domain cylinder", type=float, required=True),
        _opt("--hy", "hY", "height of the target cylinder", type=float, required=True),
        _opt("--height", "x_height", "height of the point x in C(hX)", type=float, required=True),
        SAMPLES,
        _opt("--grid-h", "grid_h", "grid spacing of the modulus solves", type=float),
    )),
    "semismooth": Route("normal-cone check and boundary charts", (
        _opt("--set", "planar_set", "planar set (.poly) or shape name", required=True),
        SAMPLES,
        _opt("--other", "other", "second set for the Hausdorff distance"),
    )),
    "fingers": Route("collapsing-finger detection", (
        CURVES,
        LIMIT,
        _opt("--delta-sep", "delta_sep", "separation threshold", type=float),
        _opt("--eps-pinch", "eps_pinch", "pinch threshold", type=float),
    )),
    "reparam": Route("uniform reparametrization toward the limit", (
        CURVES,
        LIMIT,
        _opt("--partitions", "partitions", "partition sizes", type=int, nargs="+"),
    )),
}

# Options that go to RunConfig rather than to the agent
GLOBAL_DESTS = ("json", "svg", "seed", "tolerance", "subcommand", "verbose")


def exit_code_for(outcome: Dict) -> int:
    """0 pass or computed, 1 failed verdict, 2 precondition, 3 I/O or parse."""
    codes = CLI_CONFIG["exit_codes"]
    if outcome.get("status") == "COMPLETED":
        return codes["verdict_fail"] if outcome.get("verdict") is False else codes["pass"]
    error_type = outcome.get("error_type")
    if error_type in IO_ERRORS:
        return codes["io"]
    if error_type == "StructuralError" and outcome.get("failed_at") == "Load":
        return codes["io"]
    return codes["precondition"]


IO_ERRORS = {
    "SurfaceParseError",
    "OSError",
    "FileNotFoundError",
    "IsADirectoryError",
    "NotADirectoryError",
    "PermissionError",
    "UnicodeDecodeError",
}


def route_inputs(namespace: Dict[str, Any]) -> Dict[str, Any]:
    """Agent inputs from a parsed namespace: set options only."""
    return {k: v for k, v in namespace.items() if k not in GLOBAL_DESTS and v is not None}
