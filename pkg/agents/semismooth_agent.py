"""
Semi-Smooth Agent - normal cones, manifold charts, fingers and reparametrization
Location: agents/semismooth_agent.py
"""

from typing import Dict

from agents.base_agent import GeometryAgent
from config import SEMISMOOTH_CONFIG
from geometry.errors import PreconditionError
from geometry.semismooth import (
    detect_collapsing_finger,
    hausdorff_distance,
    manifold_chart_extract,
    reparametrize_to_uniform,
    semi_smooth_check,
)
from utils.svg_render import curves_scene, planar_set_scene


class SemiSmoothAgent(GeometryAgent):
    """
    Operations:
    - semismooth: normal-cone check, and a boundary chart at every vertex when it passes
    - fingers: collapsing-finger detection over a curve sequence
    - reparam: uniform reparametrization of a curve sequence toward its limit
    """

    OPERATIONS = {
        "semismooth": ("_semismooth", ["planar_set"]),
        "fingers": ("_fingers", ["curves"]),
        "reparam": ("_reparam", ["curves", "limit"]),
    }

    def __init__(self, log_callback=None):
        super().__init__("SemiSmoothAgent", log_callback)

    def _semismooth(self, input_data: Dict):
        B = input_data["planar_set"]
        check = semi_smooth_check(B)
        report = {"check": check.to_dict(), "tolerance": SEMISMOOTH_CONFIG["cone_match_tolerance"]}
        verdict = check.passed
        if check.passed:
            charts = [manifold_chart_extract(B, z, input_data.get("samples")) for _, loop in B.named_loops() for z in loop]
            report["charts"] = [c.to_dict() for c in charts]
            verdict = all(c.passed for c in charts)
            self._log("INFO", f"Extracted {len(charts)} boundary charts")
        else:
            self._log("WARNING", f"{len(check.witnesses)} semi-smoothness witnesses")
        if input_data.get("other") is not None:
            report["hausdorff"] = hausdorff_distance(B, input_data["other"])
        return report, verdict, planar_set_scene(B, check)

    def _fingers(self, input_data: Dict):
        curves = input_data["curves"]
        result = detect_collapsing_finger(curves, input_data.get("delta_sep"), input_data.get("eps_pinch"))
        limit = input_data.get("limit")
        scene = curves_scene(curves, limit, result) if limit is not None else None
        return result.to_dict(), None, scene

    def _reparam(self, input_data: Dict):
        curves, limit = input_data["curves"], input_data["limit"]
        if limit is None:
            raise PreconditionError("reparametrization needs a limit curve", hypothesis="limit given")
        result = reparametrize_to_uniform(curves, limit, input_data.get("partitions"))
        report = result.to_dict()
        report["hausdorff_to_limit"] = [hausdorff_distance(c, limit) for c in curves]
        errors = result.sup_errors
        tolerance = self._tolerance(input_data, SEMISMOOTH_CONFIG["uniform_tolerance"])
        report["tolerance"] = tolerance
        verdict = errors[-1] <= max(errors[0], tolerance) and all(r.orientation_preserving for r in result.results)
        return report, verdict, curves_scene(curves, limit)
