"""
Surgery Agent - slits, unfolding, enlargement, double covers and flows
Location: agents/surgery_agent.py
"""

from typing import Dict, List

import numpy as np

from agents.base_agent import GeometryAgent
from config import SURGERY_CONFIG, TOLERANCE_CONFIG
from geometry.corpus import cylinder
from geometry.errors import PreconditionError
from geometry.foliation_el import dirichlet_energy, foliation_from_differential
from geometry.surface_core import (
    HalfTranslationSurface,
    area,
    boundary_components,
    gauss_bonnet_global,
    validate_surface,
)
from geometry.surface_io import edge_path_from_spec, point_from_spec, write_surface_file
from geometry.surgery import (
    CoverSpec,
    EnlargementSpec,
    SlitSpec,
    cut_slit,
    cylinder_modulus,
    double_cover_branched,
    extension_search,
    flow_clearance,
    glue_cylinders,
    horizontal_flow_family,
    slit_boundary_tips,
    unfold_slit,
)
from utils.svg_render import flow_scene, surface_scene


def enclosing_cylinder(X: HalfTranslationSurface) -> HalfTranslationSurface:
    """The flat cylinder spanned by the vertex bounds of X, in the same charts."""
    xs = [v.real for p in X.polygons for v in p.vertices]
    ys = [v.imag for p in X.polygons for v in p.vertices]
    if min(xs) != 0 or min(ys) != 0:
        raise PreconditionError("slit cylinder charts must start at the origin", hypothesis="cylinder codomain")
    return cylinder(max(ys), max(xs))


class SurgeryAgent(GeometryAgent):
    """
    Operations:
    - slit: cut a horizontal slit out of a surface
    - unfold: prong doubling at slit endpoints and the pullback of dz^2
    - enlarge: glue modulus-r cylinders to every boundary circle
    - extension: modulus of extension of C(hX) -> C(hY) by bisection
    - cover: branched or unbranched double cover with Riemann-Hurwitz check
    - flow: horizontal flow family of a slit cylinder in its cylinder
    """

    OPERATIONS = {
        "slit": ("_slit", ["surface", "start", "length"]),
        "unfold": ("_unfold", ["surface"]),
        "enlarge": ("_enlarge", ["surface", "r"]),
        "extension": ("_extension", ["hX", "hY"]),
        "cover": ("_cover", ["surface"]),
        "flow": ("_flow", ["surface"]),
    }

    def __init__(self, log_callback=None):
        super().__init__("SurgeryAgent", log_callback)

    def _write(self, s: HalfTranslationSurface, input_data: Dict) -> None:
        out = input_data.get("out")
        if out:
            write_surface_file(s, out)
            self._log("INFO", f"Surface written to {out}")

    def _slit(self, input_data: Dict):
        s = input_data["surface"]
        spec = SlitSpec(point_from_spec(s, input_data["start"]), float(input_data["length"]),
                        int(input_data.get("direction") or 1))
        cut = cut_slit(s, spec)
        validation = validate_surface(cut)
        self._write(cut, input_data)
        report = {
            "validation": validation.to_dict(),
            "tips": [{"cycle": t.cycle, "prongs": t.prongs, "point": str(t.point)} for t in slit_boundary_tips(cut)],
            "gauss_bonnet": gauss_bonnet_global(cut).to_dict(),
            "area": area(cut),
            "tolerance": TOLERANCE_CONFIG["exact"],
        }
        return report, validation.passed, surface_scene(cut, "slit")

    def _unfold(self, input_data: Dict):
        s = input_data["surface"]
        if input_data.get("tip"):
            tips = [point_from_spec(s, input_data["tip"])]
        else:
            tips = [t.point for t in slit_boundary_tips(s)]
        if not tips:
            raise PreconditionError("surface has no slit endpoints", hypothesis="slit endpoint")
        results = [unfold_slit(s, tip) for tip in tips]
        verdict = all(r.unfolded_prongs == 2 * r.original_prongs and r.pullback_ok for r in results)
        return {"tips": [r.to_dict() for r in results], "tolerance": TOLERANCE_CONFIG["exact"]}, verdict, None

    def _enlarge(self, input_data: Dict):
        s = input_data["surface"]
        r = float(input_data["r"])
        circumferences = [sum(abs(s.edge_vector(e)) for e in c) for c in boundary_components(s)]
        enlarged = glue_cylinders(s, EnlargementSpec(r))
        expected = area(s) + r * sum(c * c for c in circumferences)
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["exact"])
        self._write(enlarged, input_data)
        report = {
            "r": r,
            "area_before": area(s),
            "area_after": area(enlarged),
            "expected_area": expected,
            "boundary_circumferences": circumferences,
            "gauss_bonnet": gauss_bonnet_global(enlarged).to_dict(),
            "tolerance": tolerance,
        }
        verdict = abs(area(enlarged) - expected) <= tolerance * max(1.0, expected)
        return report, verdict, surface_scene(enlarged, f"enlargement r={r:g}")

    def _extension(self, input_data: Dict):
        hX, hY = float(input_data["hX"]), float(input_data["hY"])
        result = extension_search(hX, hY, input_data.get("search_tolerance"))
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["exact"])
        extended = glue_cylinders(cylinder(hX), EnlargementSpec(result.expected))
        complement = hY - area(extended)
        report = {
            "search": result.to_dict(),
            "extended_modulus": cylinder_modulus(extended),
            "complement_area": complement,
            "tolerance": tolerance,
        }
        verdict = abs(result.r - result.expected) <= tolerance and abs(complement) <= tolerance
        return report, verdict, None

    def _cover(self, input_data: Dict):
        s = input_data["surface"]
        spec = CoverSpec(
            branch_points=tuple(input_data.get("branch") or ()),
            cut_arcs=tuple(edge_path_from_spec(s, a) for a in input_data.get("arcs") or ()),
            cut_loops=tuple(edge_path_from_spec(s, c) for c in input_data.get("loops") or ()),
        )
        W, result = double_cover_branched(s, spec)
        base_energy = dirichlet_energy(foliation_from_differential(s))
        cover_energy = dirichlet_energy(foliation_from_differential(W))
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["exact"])
        self._write(W, input_data)
        report = {
            "cover": result.to_dict(),
            "energy_base": base_energy,
            "energy_cover": cover_energy,
            "energy_doubles": abs(cover_energy - 2 * base_energy) <= tolerance * max(1.0, base_energy),
            "tolerance": tolerance,
        }
        verdict = (
            result.riemann_hurwitz
            and result.deck_involution_ok
            and abs(result.gauss_bonnet_residual) <= tolerance
            and report["energy_doubles"]
        )
        return report, verdict, surface_scene(W, "double cover")

    def _flow(self, input_data: Dict):
        X = input_data["surface"]
        Y = input_data.get("codomain") or enclosing_cylinder(X)
        clearance = flow_clearance(X, Y)
        rng = self._rng(input_data)
        if input_data.get("t") is not None:
            times: List[float] = [float(input_data["t"])]
        else:
            count = int(input_data.get("samples") or 50)
            times = list(np.linspace(0.0, clearance.clearance, count + 1, endpoint=False)[1:])

        reports = [horizontal_flow_family(X, Y, t, rng)[1] for t in times]
        width = abs(Y.polygons[0].edge_vector(0))
        height = Y.polygons[0].signed_area / width
        report = {
            "clearance": clearance.clearance,
            "first_collision": clearance.tip,
            "slits": [sl.__dict__ for sl in clearance.slits],
            "samples": len(reports),
            "flows": [r.to_dict() for r in reports],
            "sample_points": SURGERY_CONFIG["flow_sample_points"],
            "tolerance": TOLERANCE_CONFIG["exact"],
        }
        verdict = all(r.passed for r in reports)
        self._log("INFO", f"Flow family checked at {len(reports)} times below clearance {clearance.clearance:.6g}")
        return report, verdict, flow_scene(clearance, width, height, times[-1])
