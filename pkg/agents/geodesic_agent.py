"""
Geodesic Agent - shortest paths and the quadrilateral divergence inequality
Location: agents/geodesic_agent.py
"""

from typing import Dict

from agents.base_agent import GeometryAgent
from geometry.geodesics import check_angle_condition, geodesic_between, quad_divergence
from geometry.surface_io import point_from_spec
from utils.svg_render import geodesic_scene


class GeodesicAgent(GeometryAgent):
    """
    Operations:
    - geodesic: shortest geodesic between two points within an unfolding budget
    - divergence: d(y0, y1) >= d(x0, x1) for a geodesic quadrilateral
    """

    OPERATIONS = {
        "geodesic": ("_geodesic", ["surface", "p", "q"]),
        "divergence": ("_divergence", ["surface", "x0", "x1", "y0", "y1"]),
    }

    def __init__(self, log_callback=None):
        super().__init__("GeodesicAgent", log_callback)

    def _geodesic(self, input_data: Dict):
        s = input_data["surface"]
        p = point_from_spec(s, input_data["p"])
        q = point_from_spec(s, input_data["q"])
        path = geodesic_between(s, p, q, input_data.get("budget"))
        angles = check_angle_condition(s, path)

        self._log("INFO", f"Geodesic of length {path.length:.6g} with {len(path.segments)} segments",
                  {"cone_hits": len(path.cone_hits)})
        report = {
            "path": path.to_dict(),
            "angle_condition": angles.to_dict(),
            "tolerance": angles.tolerance,
        }
        return report, angles.passed, geodesic_scene(s, path)

    def _divergence(self, input_data: Dict):
        s = input_data["surface"]
        corners = [point_from_spec(s, input_data[k]) for k in ("x0", "x1", "y0", "y1")]
        result = quad_divergence(s, *corners, budget=input_data.get("budget"))
        return result.to_dict(), result.verdict, None
