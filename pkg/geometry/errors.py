"""
Exception hierarchy for the geometry core.
Location: geometry/errors.py

The CLI maps these onto exit codes (see CLI_CONFIG in config.py).
"""

from typing import Optional


class GeometryError(Exception):
    """Base class for every error raised by the geometry package."""


class StructuralError(GeometryError, ValueError):
    """Surface data violates a structural invariant (pairing, cone angle, ...)."""


class PreconditionError(GeometryError, ValueError):
    """An operation was called outside its hypotheses."""

    def __init__(self, message: str, hypothesis: Optional[str] = None):
        super().__init__(message)
        self.hypothesis = hypothesis


class CollisionError(PreconditionError):
    """A flow parameter reached the first collision of a slit."""

    def __init__(self, message: str, tip: Optional[str] = None, clearance: Optional[float] = None):
        super().__init__(message, hypothesis="clearance")
        self.tip = tip
        self.clearance = clearance


class BudgetExhaustedError(GeometryError, RuntimeError):
    """A bounded search ended before producing a certified answer."""

    def __init__(self, message: str, budget: Optional[int] = None):
        super().__init__(message)
        self.budget = budget


class SurfaceParseError(GeometryError, ValueError):
    """Syntax error in a surface, planar-set, or curve file."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
