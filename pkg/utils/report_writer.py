"""
JSON report writer
Location: utils/report_writer.py

Reports are plain JSON. Every float is written with a fixed number of
significant digits (CLI_CONFIG) so identical runs produce identical bytes.
"""

import json
import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import BaseModel

from config import CLI_CONFIG
from utils.logger import get_logger

logger = get_logger("report_writer")


def to_jsonable(obj: Any) -> Any:
    """Reduce reports, numpy values, complex numbers and models to JSON types."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump())
    if hasattr(obj, "to_dict") and callable(obj.to_dict):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def format_float(x: float, digits: int = None) -> str:
    digits = digits or CLI_CONFIG["json_significant_digits"]
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, f".{digits}g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _emit(value: Any, indent: int, depth: int) -> str:
    pad, inner = " " * (indent * depth), " " * (indent * (depth + 1))
    if isinstance(value, dict):
        if not value:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(k)}: {_emit(v, indent, depth + 1)}" for k, v in value.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_emit(v, indent, depth + 1) for v in value) + "]"
        body = ",\n".join(inner + _emit(v, indent, depth + 1) for v in value)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value)
    return json.dumps(value)


def dumps_report(report: Any, indent: int = 2) -> str:
    return _emit(to_jsonable(report), indent, 0) + "\n"


def write_report(report: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report), encoding="utf-8")
    logger.info("report written to %s", path)
    return path
