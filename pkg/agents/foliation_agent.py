"""
Foliation Agent - extremal length, conformal modulus and heights
Location: agents/foliation_agent.py
"""

import math
from typing import Dict

from agents.base_agent import GeometryAgent
from config import MODULUS_CONFIG, TOLERANCE_CONFIG
from geometry.errors import PreconditionError
from geometry.foliation_el import (
    HORIZONTAL_FOLIATION,
    annulus_modulus_numeric,
    conductor_from_planar_set,
    cylinder_conductor,
    cylinder_cross_cut_class,
    el_monotonicity_check,
    extremal_length_of_structure,
    foliation_from_differential,
    height_of_class,
    loop_class,
    rectangle_conductor,
    refine_foliation,
    round_annulus,
)
from geometry.qc_maps import stretch_map
from geometry.surface_core import boundary_components
from geometry.surface_io import point_from_spec
from geometry.surgery import cylinder_modulus


class FoliationAgent(GeometryAgent):
    """
    Operations:
    - el: extremal length of the structure foliation, optionally with the
      K-monotonicity check under a Teichmuller stretch
    - modulus: finite-difference modulus of a doubly connected domain
    - height: least transverse measure in a curve class
    """

    OPERATIONS = {
        "el": ("_extremal_length", ["surface"]),
        "modulus": ("_modulus", []),
        "height": ("_height", ["surface"]),
    }

    def __init__(self, log_callback=None):
        super().__init__("FoliationAgent", log_callback)

    def _extremal_length(self, input_data: Dict):
        s = input_data["surface"]
        orientation = input_data.get("orientation") or HORIZONTAL_FOLIATION
        result = extremal_length_of_structure(s, orientation)
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["energy"])
        report = {"extremal_length": result.to_dict(), "tolerance": tolerance}
        verdict = abs(result.value - result.area) <= tolerance * max(1.0, result.area)

        K = input_data.get("K")
        if K is not None:
            _, m = stretch_map(s, float(K))
            f = foliation_from_differential(s, orientation)
            divisions = int(input_data.get("refine") or 1)
            if divisions > 1:
                f = refine_foliation(f, divisions)
            monotone = el_monotonicity_check(f, m, float(K))
            report["monotonicity"] = monotone.to_dict()
            verdict = verdict and monotone.passed
            self._log("INFO", f"Energy {monotone.energy_before:.6g} -> {monotone.energy_after:.6g} under K={K}")
        return report, verdict, None

    def _conductor(self, input_data: Dict):
        """Domain to solve and the closed-form modulus when one is known."""
        if input_data.get("planar_set") is not None:
            return conductor_from_planar_set(input_data["planar_set"]), None
        if input_data.get("inner") is not None and input_data.get("outer") is not None:
            r, R = float(input_data["inner"]), float(input_data["outer"])
            return round_annulus(r, R), math.log(R / r) / (2 * math.pi)
        if input_data.get("surface") is not None:
            s = input_data["surface"]
            components = boundary_components(s)
            if len(s.polygons) != 1 or s.polygons[0].n != 4 or len(components) != 2:
                raise PreconditionError("modulus of a surface needs a one-rectangle flat cylinder",
                                        hypothesis="cylinder")
            poly = s.polygons[0]
            circumference = abs(poly.edge_vector(0))
            height = poly.signed_area / circumference
            return cylinder_conductor(height, circumference), cylinder_modulus(s)
        if input_data.get("height") is not None:
            height = float(input_data["height"])
            width = float(input_data.get("width") or 1.0)
            periodic = bool(input_data.get("periodic", True))
            expected = height / width if periodic else None
            return rectangle_conductor(width, height, periodic), expected
        raise PreconditionError("modulus needs a planar set, a cylinder, a round annulus or a height",
                                hypothesis="conductor domain")

    def _modulus(self, input_data: Dict):
        domain, expected = self._conductor(input_data)
        grid_h = input_data.get("grid_h")
        if grid_h is None and input_data.get("grid"):
            minx, miny, maxx, maxy = domain.region.bounds
            grid_h = max(maxx - minx, maxy - miny) / int(input_data["grid"])
        result = annulus_modulus_numeric(domain, grid_h)
        report = {"modulus": result.to_dict(), "expected": expected}
        verdict = None
        if expected is not None:
            tolerance = self._tolerance(input_data, MODULUS_CONFIG["relative_tolerance"])
            relative = abs(result.modulus - expected) / expected
            report.update({"relative_error": relative, "tolerance": tolerance})
            verdict = relative <= tolerance
        self._log("INFO", f"Modulus of {result.label}: {result.modulus:.6g}", {"nodes": result.nodes})
        return report, verdict, None

    def _height(self, input_data: Dict):
        s = input_data["surface"]
        f = foliation_from_differential(s, input_data.get("orientation") or HORIZONTAL_FOLIATION)
        loop = input_data.get("loop")
        if loop:
            curve = loop_class(f, [point_from_spec(s, p) for p in loop])
        else:
            curve = cylinder_cross_cut_class(f, int(input_data.get("polygon") or 0))
        result = height_of_class(f, curve, input_data.get("budget"), strict=not input_data.get("lenient"))
        return result.to_dict(), None, None
