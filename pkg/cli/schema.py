"""
Request and report models for the command line
Location: cli/schema.py
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from cli.routes import SUBCOMMANDS
from config import CLI_CONFIG
from geometry.errors import PreconditionError, SurfaceParseError
from geometry.qc_maps import PiecewiseAffineMap, apply_matrix, piecewise_linear_map
from geometry.surface_core import HalfTranslationSurface


class OutputMode(str, Enum):
    json = "json"
    svg = "svg"
    text = "text"


class RunConfig(BaseModel):
    """One invocation: a subcommand, its inputs and the global options."""

    subcommand: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    output_mode: OutputMode = OutputMode.text
    svg: Optional[Path] = None
    seed: int = CLI_CONFIG["default_seed"]
    tolerance: Optional[float] = None

    @field_validator("subcommand")
    @classmethod
    def validate_subcommand(cls, v):
        if v not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand '{v}'")
        return v

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v):
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v

    @field_validator("tolerance")
    @classmethod
    def validate_tolerance(cls, v):
        if v is not None and not v > 0:
            raise ValueError("tolerance must be positive")
        return v


# ============= MAP INTERCHANGE =============

class FaceMap(BaseModel):
    """w = M z + b on one face of the domain."""

    matrix: List[List[float]]
    translation: Tuple[float, float] = (0.0, 0.0)
    codomain_face: Optional[int] = None

    @field_validator("matrix")
    @classmethod
    def validate_matrix(cls, v):
        if len(v) != 2 or any(len(row) != 2 for row in v):
            raise ValueError("matrix must be 2x2")
        return v


class MapInterchange(BaseModel):
    """
    JSON form of a face-wise affine map:

        {"faces": [{"matrix": [[a, b], [c, d]], "translation": [x, y], "codomain_face": 0}, ...]}

    Face k of the list acts on polygon k of the domain surface.
    """

    faces: List[FaceMap]

    def to_map(self, domain: HalfTranslationSurface) -> PiecewiseAffineMap:
        if len(self.faces) != len(domain.polygons):
            raise PreconditionError(
                f"map has {len(self.faces)} faces, domain has {len(domain.polygons)} polygons",
                hypothesis="face correspondence",
            )
        images = []
        for face, poly in zip(self.faces, domain.polygons):
            M, b = np.asarray(face.matrix, dtype=float), complex(*face.translation)
            images.append([apply_matrix(M, v) + b for v in poly.vertices])
        face_map = [k if f.codomain_face is None else f.codomain_face for k, f in enumerate(self.faces)]
        return piecewise_linear_map(domain, images, face_map=face_map)

    @classmethod
    def from_map(cls, m: PiecewiseAffineMap) -> "MapInterchange":
        return cls.model_validate(m.to_dict())


def load_map_file(path) -> MapInterchange:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return MapInterchange.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise SurfaceParseError(f"map file {path}: {where}: {first['msg']}", 1, 1) from None


# ============= REPORTS =============

class ReportEnvelope(BaseModel):
    """What --json writes; no timestamps, so reruns are byte-identical."""

    subcommand: str
    seed: int
    tolerance: Optional[float] = None
    verdict: Optional[bool] = None
    report: Any = None


class ErrorEnvelope(BaseModel):
    subcommand: str
    failed_at: str
    error: str
    error_type: str
    hypothesis: Optional[str] = None
    exit_code: int
