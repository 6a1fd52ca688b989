"""
Blob Agent - Grunsky disks, residue pairings and cylinder blobs
Location: agents/blob_agent.py
"""

import math
from typing import Dict

from agents.base_agent import GeometryAgent
from config import BLOB_CONFIG
from geometry.blob_regions import (
    ResiduePole,
    cylinder_blob_estimate,
    disk_ray_path,
    grunsky_disk,
    koebe_boundary_value,
    pairing_quadrature_check,
    residue_pairing,
    residue_sector_scan,
    sample_class_S_check,
    sample_path,
    vertical_direction,
)
from utils.svg_render import blob_scene
from utils.validators import require_in_unit_disk


class BlobAgent(GeometryAgent):
    """
    Operations:
    - grunsky: Monte-Carlo check of the Grunsky disk with Koebe boundary values
    - residue: residue pairing, its quadrature form and the sector scan
    - blob-cylinder: inner and outer estimates of the blob of C(hX) in C(hY)
    """

    OPERATIONS = {
        "grunsky": ("_grunsky", ["z"]),
        "residue": ("_residue", []),
        "blob-cylinder": ("_blob_cylinder", ["hX", "hY", "x_height"]),
    }

    def __init__(self, log_callback=None):
        super().__init__("BlobAgent", log_callback)

    def _grunsky(self, input_data: Dict):
        z = complex(input_data["z"])
        require_in_unit_disk(z)
        check = sample_class_S_check(z, input_data.get("samples"), self._rng(input_data))

        # Koebe values sit on the rim of the disk at every radius
        tolerance = self._tolerance(input_data, BLOB_CONFIG["koebe_rim_tolerance"])
        rim = []
        for r in [k / 10 for k in range(1, 10)]:
            disk = grunsky_disk(r)
            rim.append(abs(abs(koebe_boundary_value(r) - disk.center) - disk.radius))
        disk = grunsky_disk(z)
        path = sample_path(disk_ray_path(disk, koebe_boundary_value(abs(z))), 9) if z.imag == 0 else []

        report = {
            "check": check.to_dict(),
            "koebe_rim_residuals": rim,
            "ray_to_center": path,
            "tolerance": tolerance,
        }
        return report, check.passed and max(rim) <= tolerance, None

    def _residue(self, input_data: Dict):
        pole = ResiduePole(complex(input_data.get("location") or 0j), complex(input_data.get("c") or 1.0))
        v = complex(input_data.get("v") or vertical_direction(pole))
        rho1 = float(input_data.get("rho1") or 0.25)
        rho2 = float(input_data.get("rho2") or 0.75)
        resolution = int(input_data.get("resolution") or BLOB_CONFIG["quadrature_resolution"])

        pairing = residue_pairing(pole, v)
        quadrature = pairing_quadrature_check(pole, v, rho1, rho2, resolution)
        scan = residue_sector_scan(pole, input_data.get("angles"))

        tolerance = self._tolerance(input_data, BLOB_CONFIG["quadrature_tolerance"])
        step = 2 * math.pi / len(scan.angles)
        flips_ok = len(scan.sign_changes) == 2 and all(abs(abs(t) - math.pi / 2) <= step for t in scan.sign_changes)
        report = {
            "pairing": pairing,
            "vertical_direction": vertical_direction(pole),
            "quadrature": quadrature.to_dict(),
            "sign_changes": scan.sign_changes,
            "negative_arc": list(scan.negative_arc),
            "tolerance": tolerance,
        }
        verdict = quadrature.relative_error <= tolerance and flips_ok
        return report, verdict, None

    def _blob_cylinder(self, input_data: Dict):
        estimate = cylinder_blob_estimate(
            float(input_data["hX"]),
            float(input_data["hY"]),
            float(input_data["x_height"]),
            input_data.get("samples"),
            input_data.get("grid_h"),
        )
        report = estimate.to_dict()
        report["tolerance"] = BLOB_CONFIG["exclusion_tolerance"]
        verdict = estimate.inner_in_outer and estimate.outer_connected
        return report, verdict, blob_scene(estimate)
