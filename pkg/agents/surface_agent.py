"""
Surface Agent - structural validation and Gauss-Bonnet balance
Location: agents/surface_agent.py

Operations:
- validate: structural invariants, cone points, area, Euler characteristic
- gaussbonnet: global balance, optionally repeated over random subdivisions,
  or the balance of a closed geodesic polygon through given corners
"""

from dataclasses import replace
from typing import Dict, List, Optional

import numpy as np

from agents.base_agent import GeometryAgent
from config import TOLERANCE_CONFIG
from geometry.errors import PreconditionError, StructuralError
from geometry.geodesics import geodesic_between, polygon_gauss_bonnet
from geometry.surface_core import (
    HalfTranslationSurface,
    area,
    cone_points,
    euler_characteristic,
    gauss_bonnet_global,
    split_edge,
    subdivide,
    validate_surface,
)
from geometry.surface_io import point_from_spec
from utils.svg_render import cones_scene


def random_subdivision(s: HalfTranslationSurface, rng: np.random.Generator, attempts: int = 20) -> HalfTranslationSurface:
    """Cut a random diagonal, or split a random edge when no polygon has a diagonal left."""
    for _ in range(attempts):
        candidates = [pid for pid, p in enumerate(s.polygons) if p.n >= 4]
        if candidates and rng.random() < 0.7:
            pid = int(rng.choice(candidates))
            n = s.polygons[pid].n
            i = int(rng.integers(n))
            j = i + int(rng.integers(2, n - 1))
            try:
                return subdivide(s, pid, i, j)
            except PreconditionError:
                continue
        edges = list(s.edges())
        e = edges[int(rng.integers(len(edges)))]
        try:
            return split_edge(s, e, float(rng.uniform(0.2, 0.8)))
        except StructuralError:
            continue
    return s


class SurfaceAgent(GeometryAgent):
    """
    Checks a half-translation surface before anything else runs on it.
    """

    OPERATIONS = {
        "validate": ("_validate", ["surface"]),
        "gaussbonnet": ("_gauss_bonnet", ["surface"]),
    }

    def __init__(self, log_callback=None):
        super().__init__("SurfaceAgent", log_callback)

    def _validate(self, input_data: Dict):
        s = input_data["surface"]
        validation = validate_surface(s)
        report = {"validation": validation.to_dict(), "tolerance": TOLERANCE_CONFIG["exact"]}
        if validation.passed:
            cones = cone_points(s)
            report.update({
                "cone_points": [c.to_dict() for c in cones],
                "singular_points": sum(1 for c in cones if c.singular),
                "area": area(s),
                "euler_characteristic": euler_characteristic(s),
                "polygons": len(s.polygons),
                "boundary_edges": len(s.boundary),
            })
            self._log("INFO", f"Surface valid with {len(cones)} vertex cycles")
        scene = cones_scene(s) if validation.passed else None
        return report, validation.passed, scene

    def _gauss_bonnet(self, input_data: Dict):
        s = input_data["surface"]
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["exact"])

        corners = input_data.get("corners")
        if corners:
            return self._polygon_balance(s, corners, input_data.get("budget"), tolerance)

        base = replace(gauss_bonnet_global(s), tolerance=tolerance)
        residuals = [base.residual]
        subdivisions = int(input_data.get("subdivisions") or 0)
        if subdivisions:
            rng = self._rng(input_data)
            current = s
            for _ in range(subdivisions):
                current = random_subdivision(current, rng)
                residuals.append(gauss_bonnet_global(current).residual)
            self._log("INFO", f"Balanced over {subdivisions} random subdivisions",
                      {"polygons": len(current.polygons)})

        worst = max(abs(r) for r in residuals)
        report = {
            "global": base.to_dict(),
            "subdivisions": subdivisions,
            "max_residual": worst,
            "tolerance": tolerance,
        }
        return report, worst < tolerance, cones_scene(s)

    def _polygon_balance(self, s: HalfTranslationSurface, corners: List, budget: Optional[int], tolerance: float):
        points = [point_from_spec(s, c) for c in corners]
        if len(points) < 2:
            raise PreconditionError("a geodesic polygon needs at least two corners", hypothesis="closed polygon")
        sides = [geodesic_between(s, p, q, budget) for p, q in zip(points, points[1:] + points[:1])]
        result = replace(polygon_gauss_bonnet(s, sides), tolerance=tolerance)
        report = {
            "polygon": result.to_dict(),
            "side_lengths": [side.length for side in sides],
            "tolerance": tolerance,
        }
        return report, result.passed, cones_scene(s)
