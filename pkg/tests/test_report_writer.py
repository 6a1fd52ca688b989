"""
Unit tests for JSON report serialization
Location: tests/test_report_writer.py
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from cli.schema import ReportEnvelope
from utils.report_writer import dumps_report, format_float, to_jsonable, write_report


@dataclass
class _Sample:
    value: float
    point: complex


def test_to_jsonable_reduces_numeric_types():
    data = to_jsonable({
        "array": np.array([1.0, 2.0]),
        "z": 1 + 2j,
        "flag": np.bool_(True),
        "count": np.int64(3),
        "tags": {"b", "a"},
        1: _Sample(0.5, 1j),
    })
    assert data == {
        "array": [1.0, 2.0],
        "z": [1.0, 2.0],
        "flag": True,
        "count": 3,
        "tags": ["a", "b"],
        "1": {"value": 0.5, "point": [0.0, 1.0]},
    }


def test_models_are_dumped():
    envelope = ReportEnvelope(subcommand="grunsky", seed=1, verdict=True, report={"x": 1.5})
    assert to_jsonable(envelope)["report"] == {"x": 1.5}


def test_float_formatting():
    assert format_float(1.0) == "1.0"
    assert format_float(2.5) == "2.5"
    assert format_float(math.nan) == '"nan"'
    assert format_float(-math.inf) == '"-inf"'


def test_dumps_is_valid_and_stable():
    report = {"verdict": True, "values": [0.25, 1e-12], "nested": [{"k": None}], "empty": {}}
    text = dumps_report(report)
    assert text == dumps_report(report)
    assert text.endswith("\n")
    assert json.loads(text) == {"verdict": True, "values": [0.25, 1e-12], "nested": [{"k": None}], "empty": {}}


def test_write_report_creates_parents(tmp_path):
    path = write_report({"a": 1}, tmp_path / "out" / "report.json")
    assert json.loads(path.read_text(encoding="utf-8")) == {"a": 1}
