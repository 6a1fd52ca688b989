"""
Comprehensive Unit Tests for the Coordinator
Location: tests/test_coordinator.py

Tests input loading, pipeline execution, failure stages and the event log.
"""

import json

import pytest

from agents.coordinator import Coordinator, load_curves, load_planar_set, load_surface
from cli.schema import ReportEnvelope, RunConfig
from geometry.errors import StructuralError
from geometry.semismooth import PlanarSet


# ============= FIXTURES =============

@pytest.fixture
def coordinator():
    """Create Coordinator instance for testing."""
    return Coordinator()


@pytest.fixture
def broken_surface(tmp_path):
    """A square with only one of its two edge pairs glued."""
    path = tmp_path / "broken.hts"
    path.write_text(
        "polygon P0\n0 0\n1 0\n1 1\n0 1\npair P0.0 P0.2 sign=+1\n",
        encoding="utf-8",
    )
    return path


# ============= TEST 1: INPUT LOADING =============

def test_load_surface_from_file_and_corpus(data_dir):
    """
    Validates:
    - .hts paths and corpus names give the same surface
    - unknown references are reported as missing files
    """
    print("\n" + "="*70)
    print("TEST 1: Input Loading")
    print("="*70)

    from_file = load_surface(data_dir / "square_torus.hts")
    from_corpus = load_surface("square_torus")
    assert len(from_file.polygons) == len(from_corpus.polygons) == 1
    assert from_file.polygons[0].vertices == from_corpus.polygons[0].vertices
    assert load_surface(from_corpus) is from_corpus

    with pytest.raises(FileNotFoundError):
        load_surface("no_such_surface")

    print("✅ Surfaces load from files and the corpus")


def test_load_broken_surface(broken_surface):
    with pytest.raises(StructuralError, match="edge_coverage"):
        load_surface(broken_surface)
    assert len(load_surface(broken_surface, validate=False).pairings) == 1


def test_load_planar_sets_and_curves(data_dir):
    assert isinstance(load_planar_set("l_shape"), PlanarSet)
    assert isinstance(load_planar_set(data_dir / "square.poly"), PlanarSet)

    curves, limit = load_curves("ellipses")
    assert len(curves) > 1
    assert limit is not None

    curves, limit = load_curves([data_dir / "octagon_ellipses.curve"])
    assert curves


# ============= TEST 2: PIPELINE EXECUTION =============

@pytest.mark.parametrize("subcommand, inputs", [
    ("validate", {"surface": "octagon"}),
    ("gaussbonnet", {"surface": "square_torus", "subdivisions": 3}),
    ("el", {"surface": "cylinder_c2"}),
    ("geodesic", {"surface": "square_torus", "p": "P0:0.1,0.1", "q": "P0:0.4,0.5"}),
    ("grunsky", {"z": 0.5, "samples": 200}),
])
def test_pipeline_completes(coordinator, subcommand, inputs):
    outcome = coordinator.execute_pipeline({"subcommand": subcommand, "inputs": inputs})
    assert outcome["status"] == "COMPLETED"
    assert outcome["subcommand"] == subcommand
    assert outcome["verdict"] is True
    assert outcome["session_id"].startswith("SES")
    assert outcome["svg"] is None


def test_pipeline_accepts_run_config(coordinator):
    config = RunConfig(subcommand="extension", inputs={"hX": 1.0, "hY": 3.0}, seed=5)
    outcome = coordinator.execute_pipeline(config)
    assert outcome["status"] == "COMPLETED"
    assert outcome["agent"] == "SurgeryAgent"
    assert outcome["seed"] == 5


def test_validate_reports_broken_surface(coordinator, broken_surface):
    outcome = coordinator.execute_pipeline({"subcommand": "validate", "inputs": {"surface": str(broken_surface)}})
    assert outcome["status"] == "COMPLETED"
    assert outcome["verdict"] is False
    assert not outcome["report"]["validation"]["passed"]


def test_pipeline_writes_svg(coordinator, tmp_path):
    target = tmp_path / "figures" / "octagon.svg"
    outcome = coordinator.execute_pipeline({
        "subcommand": "validate",
        "inputs": {"surface": "octagon"},
        "svg": str(target),
    })
    assert outcome["status"] == "COMPLETED"
    assert outcome["svg"] == str(target)
    assert target.read_text(encoding="utf-8").lstrip().startswith("<")


def test_svg_without_scene_is_skipped(coordinator, tmp_path):
    target = tmp_path / "none.svg"
    outcome = coordinator.execute_pipeline({
        "subcommand": "extension",
        "inputs": {"hX": 1.0, "hY": 2.0},
        "svg": str(target),
    })
    assert outcome["status"] == "COMPLETED"
    assert outcome["svg"] is None
    assert not target.exists()
    assert any(e["level"] == "WARNING" for e in outcome["event_log"])


# ============= TEST 3: FAILURE STAGES =============

def test_failure_at_load(coordinator, broken_surface):
    """
    Validates:
    - a missing file fails at Load with the exception type
    - a structurally broken surface fails at Load for any other subcommand
    """
    print("\n" + "="*70)
    print("TEST 3: Failure Stages")
    print("="*70)

    missing = coordinator.execute_pipeline({"subcommand": "el", "inputs": {"surface": "missing.hts"}})
    assert missing["status"] == "FAILED"
    assert missing["failed_at"] == "Load"
    assert missing["error_type"] == "FileNotFoundError"

    broken = coordinator.execute_pipeline({"subcommand": "el", "inputs": {"surface": str(broken_surface)}})
    assert broken["failed_at"] == "Load"
    assert broken["error_type"] == "StructuralError"

    print("✅ Load failures carry their stage and type")


def test_map_needs_domain(coordinator, data_dir):
    outcome = coordinator.execute_pipeline({
        "subcommand": "dilatation",
        "inputs": {"map": str(data_dir / "shear_map.json")},
    })
    assert outcome["failed_at"] == "Load"
    assert outcome["hypothesis"] == "map domain"


def test_failure_in_agent(coordinator):
    outcome = coordinator.execute_pipeline({"subcommand": "extension", "inputs": {"hX": 2.0, "hY": 1.0}})
    assert outcome["status"] == "FAILED"
    assert outcome["failed_at"] == "SurgeryAgent"
    assert outcome["error_type"] == "PreconditionError"
    assert outcome["hypothesis"] == "hX<=hY"


def test_unknown_subcommand_is_rejected(coordinator):
    with pytest.raises(ValueError):
        coordinator.execute_pipeline({"subcommand": "teleport", "inputs": {}})


# ============= TEST 4: EVENT LOG AND ENVELOPES =============

def test_event_log_and_export(coordinator, tmp_path):
    coordinator.execute_pipeline({"subcommand": "grunsky", "inputs": {"z": 0.25, "samples": 100}})
    events = coordinator.get_event_log()
    assert any("STEP 1" in e["message"] for e in events)
    assert any(e["agent"] == "BlobAgent" for e in events)

    path = tmp_path / "session.json"
    coordinator.export_session(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["session_id"] == coordinator.current_session
    assert data["event_log"]

    coordinator.clear_event_log()
    assert coordinator.get_event_log() == []


def test_event_log_holds_one_session(coordinator):
    coordinator.execute_pipeline({"subcommand": "grunsky", "inputs": {"z": 0.25, "samples": 100}})
    coordinator.execute_pipeline({"subcommand": "validate", "inputs": {"surface": "octagon"}})
    events = coordinator.get_event_log()
    assert sum("STEP 1" in e["message"] for e in events) == 1
    assert not any(e["agent"] == "BlobAgent" for e in events)


def test_envelope_is_deterministic(coordinator):
    inputs = {"subcommand": "grunsky", "inputs": {"z": 0.3, "samples": 100}, "seed": 11}
    first = coordinator.envelope(coordinator.execute_pipeline(inputs))
    second = coordinator.envelope(coordinator.execute_pipeline(inputs))
    assert isinstance(first, ReportEnvelope)
    assert first.model_dump() == second.model_dump()
    assert first.seed == 11


def test_operations_cover_every_agent(coordinator):
    operations = coordinator.operations()
    assert len(operations) == len(set(operations))
    for op in ("validate", "geodesic", "el", "stretch", "slit", "grunsky", "semismooth"):
        assert op in operations
