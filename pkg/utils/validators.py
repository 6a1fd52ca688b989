"""
Numeric validation helpers shared by the geometry core and the agents.
Location: utils/validators.py
"""

import math
from typing import Dict, Iterable, List

from config import TOLERANCE_CONFIG


def is_multiple_of_pi(angle: float, tol: float = None) -> bool:
    tol = TOLERANCE_CONFIG["exact"] if tol is None else tol
    n = round(angle / math.pi)
    return n >= 1 and abs(angle - n * math.pi) <= tol


def prong_count(angle: float) -> int:
    """Integer n with angle = n*pi (caller checks is_multiple_of_pi first)."""
    return int(round(angle / math.pi))


def require_positive(value: float, name: str) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


def require_in_unit_disk(z: complex, closed: bool = False) -> None:
    r = abs(z)
    if (closed and r > 1.0) or (not closed and r >= 1.0):
        raise ValueError(f"|z| = {r} is outside the unit disk")


def validate_required_fields(data: Dict, required_fields: Iterable[str]) -> None:
    """Raise ValueError naming the missing keys."""
    missing = [field for field in required_fields if field not in data]
    if missing:
        raise ValueError(f"Missing required fields: {', '.join(missing)}")


def non_increasing(values: List[float], slack: float = 0.0) -> bool:
    return all(b <= a + slack for a, b in zip(values, values[1:]))
