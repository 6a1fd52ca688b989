"""
QC Agent - Teichmuller stretches, dilatations and point pushes
Location: agents/qc_agent.py
"""

from typing import Dict

import numpy as np

from agents.base_agent import GeometryAgent
from config import TOLERANCE_CONFIG
from geometry.foliation_el import el_monotonicity_check, foliation_from_differential
from geometry.qc_maps import (
    beltrami_of,
    dilatation_of,
    linear_map,
    push_point,
    shear_dilatation,
    shear_gadget,
    stretch_map,
    teichmuller_embedding_check,
    triangle_punch_map,
)
from geometry.surface_io import write_surface_file
from utils.svg_render import surface_scene
from utils.validators import non_increasing, require_positive


class QCAgent(GeometryAgent):
    """
    Operations:
    - stretch: x + iy -> Kx + iy with Beltrami, embedding and energy checks
    - dilatation: dilatation of a linear map on a surface, of a shear, or of
      the boundary-punch gadget over shrinking triangles
    - push: piecewise-affine point push inside a round disk
    """

    OPERATIONS = {
        "stretch": ("_stretch", ["surface", "K"]),
        "dilatation": ("_dilatation", []),
        "push": ("_push", ["radius", "displacement"]),
    }

    def __init__(self, log_callback=None):
        super().__init__("QCAgent", log_callback)

    def _stretch(self, input_data: Dict):
        s = input_data["surface"]
        K = float(input_data["K"])
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["exact"])
        stretched, m = stretch_map(s, K, allow_compression=bool(input_data.get("allow_compression")))

        expected_mu = abs(K - 1) / (K + 1)
        mu = beltrami_of(m).max_modulus
        K_map = dilatation_of(m)
        embedding = teichmuller_embedding_check(m, K)
        monotone = el_monotonicity_check(foliation_from_differential(s), m, K_map)

        out = input_data.get("out")
        if out:
            write_surface_file(stretched, out)
            self._log("INFO", f"Stretched surface written to {out}")

        report = {
            "K": K,
            "dilatation": K_map,
            "beltrami": mu,
            "expected_beltrami": expected_mu,
            "embedding": embedding.to_dict(),
            "monotonicity": monotone.to_dict(),
            "tolerance": tolerance,
        }
        verdict = abs(mu - expected_mu) <= tolerance and embedding.passed and monotone.passed
        return report, verdict, surface_scene(stretched, f"stretch K={K:g}")

    def _dilatation(self, input_data: Dict):
        if input_data.get("shear") is not None:
            return self._shear(input_data)
        if input_data.get("map") is not None:
            m = input_data["map"]
            datum = beltrami_of(m)
            report = {"dilatation": dilatation_of(m), "beltrami": datum.to_dict(), "faces": m.faces}
            return report, None, surface_scene(m.codomain, "map image")
        if input_data.get("matrix") is not None:
            s = input_data.get("surface")
            if s is None:
                raise ValueError("dilatation of a matrix needs a surface")
            m = linear_map(s, np.asarray(input_data["matrix"], dtype=float).reshape(2, 2))
            datum = beltrami_of(m)
            return {"dilatation": dilatation_of(m), "beltrami": datum.to_dict()}, None, None
        K = float(input_data.get("K") or 2.0)
        deltas = [10.0 ** -k for k in range(1, 7)]
        values = [dilatation_of(triangle_punch_map(K, d)) for d in deltas]
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["verdict_slack"])
        decreasing = non_increasing(values, tolerance)
        report = {"K": K, "deltas": deltas, "dilatations": values, "decreasing": decreasing, "tolerance": tolerance}
        return report, decreasing and values[-1] >= 1.0 - tolerance, None

    def _shear(self, input_data: Dict):
        """Closed form against the matrix value, then the gadget over delta = 10^-1 .. 10^-6."""
        b = float(input_data["shear"])
        closed_form = shear_dilatation(b)
        tolerance = self._tolerance(input_data, TOLERANCE_CONFIG["exact"])
        K = float(input_data.get("K") or 2.0)
        deltas = [10.0 ** -k for k in range(1, 7)]
        gadget = [shear_gadget(K, d)[1] for d in deltas]
        matrix_value = shear_gadget(1.0 + abs(b), 1.0)[1]
        report = {
            "b": b,
            "dilatation": closed_form,
            "matrix_dilatation": matrix_value,
            "gadget_K": K,
            "deltas": deltas,
            "gadget_dilatations": gadget,
            "tolerance": tolerance,
        }
        verdict = abs(closed_form - matrix_value) <= tolerance and non_increasing(gadget) and gadget[-1] >= 1.0
        return report, verdict, None

    def _push(self, input_data: Dict):
        radius = float(input_data["radius"])
        require_positive(radius, "radius")
        result = push_point(radius, complex(input_data["displacement"]), input_data.get("ring_size"))
        return result.to_dict(), None, None
