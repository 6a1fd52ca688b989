"""
Coordinator Agent for the Half-Translation Surface Workbench
Location: agents/coordinator.py

Runs one operation per invocation:
1. Load inputs → 2. Dispatch to the owning agent → 3. Render figure → 4. Consolidate

Handles:
- Surface, planar-set, curve and map inputs given as files or corpus names
- Error handling with the failing stage and exception type
- Event logging for observability
- Final report consolidation
"""

import json
import random
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from agents.blob_agent import BlobAgent
from agents.foliation_agent import FoliationAgent
from agents.geodesic_agent import GeodesicAgent
from agents.qc_agent import QCAgent
from agents.semismooth_agent import SemiSmoothAgent
from agents.surface_agent import SurfaceAgent
from agents.surgery_agent import SurgeryAgent
from cli.schema import ReportEnvelope, RunConfig, load_map_file
from config import SURFACE_FORMAT
from geometry.corpus import CORPUS, build
from geometry.errors import GeometryError, PreconditionError
from geometry.semismooth import CURVE_FAMILIES, PLANAR_SETS, ClosedCurve, PlanarSet
from geometry.surface_core import HalfTranslationSurface
from geometry.surface_io import parse_curve_file, parse_planar_set_file, parse_surface_file
from utils.logger import get_logger
from utils.report_writer import to_jsonable
from utils.svg_render import render_svg

logger = get_logger("coordinator")

_LEVELS = {"DEBUG": 10, "INFO": 20, "SUCCESS": 20, "WARNING": 30, "ERROR": 40, "CRITICAL": 50}


# ============= INPUT LOADING =============

def load_surface(ref: Union[str, Path, HalfTranslationSurface], validate: bool = True) -> HalfTranslationSurface:
    """A .hts file, or the name of a corpus surface."""
    if isinstance(ref, HalfTranslationSurface):
        return ref
    path = Path(ref)
    if path.suffix == SURFACE_FORMAT["surface_suffix"] or path.exists():
        return parse_surface_file(path, validate=validate)
    if str(ref) in CORPUS:
        return build(str(ref))
    raise FileNotFoundError(f"no surface file or corpus surface named {ref!r}")


def load_planar_set(ref: Union[str, Path, PlanarSet]) -> PlanarSet:
    """A .poly file, or the name of a built-in shape."""
    if isinstance(ref, PlanarSet):
        return ref
    if str(ref) in PLANAR_SETS:
        return PLANAR_SETS[str(ref)]()
    return parse_planar_set_file(ref)


def load_curves(refs) -> Tuple[List[ClosedCurve], Optional[ClosedCurve]]:
    """A curve family name, or one or more .curve files read in order."""
    if isinstance(refs, (str, Path)):
        refs = [refs]
    if len(refs) == 1 and str(refs[0]) in CURVE_FAMILIES:
        return CURVE_FAMILIES[str(refs[0])]()
    curves: List[ClosedCurve] = []
    limit = None
    for ref in refs:
        found, found_limit = parse_curve_file(ref)
        curves.extend(found)
        limit = found_limit or limit
    return curves, limit


class Coordinator:
    """
    Central orchestrator for the geometry agents.

    Responsibilities:
    - Turn file and corpus references into loaded objects
    - Route the operation to the agent that serves it
    - Write the SVG figure when one is requested
    - Log all events for observability
    """

    def __init__(self):
        # Event log for tracking
        self.event_log: List[Dict] = []

        # Initialize agents with logging callback
        self.surface_agent = SurfaceAgent(log_callback=self._log_event)
        self.geodesic_agent = GeodesicAgent(log_callback=self._log_event)
        self.foliation_agent = FoliationAgent(log_callback=self._log_event)
        self.qc_agent = QCAgent(log_callback=self._log_event)
        self.surgery_agent = SurgeryAgent(log_callback=self._log_event)
        self.blob_agent = BlobAgent(log_callback=self._log_event)
        self.semismooth_agent = SemiSmoothAgent(log_callback=self._log_event)

        self.agents = [
            self.surface_agent,
            self.geodesic_agent,
            self.foliation_agent,
            self.qc_agent,
            self.surgery_agent,
            self.blob_agent,
            self.semismooth_agent,
        ]

        # Pipeline state
        self.current_session = None

        self._log_event("Coordinator", "INFO", "Coordinator initialized successfully")

    def operations(self) -> List[str]:
        return sorted(op for agent in self.agents for op in agent.OPERATIONS)

    def _agent_for(self, operation: str):
        for agent in self.agents:
            if agent.handles(operation):
                return agent
        raise ValueError(f"no agent handles '{operation}'")

    def load_inputs(self, inputs: Dict, operation: str) -> Dict:
        """Replace references in the raw inputs with loaded objects."""
        loaded = dict(inputs)
        if loaded.get("surface") is not None:
            # validate reports structural problems itself instead of refusing the file
            loaded["surface"] = load_surface(loaded["surface"], validate=operation != "validate")
        if loaded.get("codomain") is not None:
            loaded["codomain"] = load_surface(loaded["codomain"])
        for key in ("planar_set", "other"):
            if loaded.get(key) is not None:
                loaded[key] = load_planar_set(loaded[key])
        if loaded.get("curves") is not None:
            curves, limit = load_curves(loaded["curves"])
            loaded["curves"] = curves
            if loaded.get("limit") is not None:
                found, _ = load_curves(loaded["limit"])
                limit = found[0] if found else None
            loaded["limit"] = limit
        if loaded.get("map") is not None:
            if loaded.get("surface") is None:
                raise PreconditionError("a map file needs its domain surface", hypothesis="map domain")
            loaded["map"] = load_map_file(loaded["map"]).to_map(loaded["surface"])
        return loaded

    def execute_pipeline(self, run_config: Union[RunConfig, Dict]) -> Dict:
        """
        Main pipeline execution method.

        Args:
            run_config: RunConfig or its dict form
            {
                "subcommand": "geodesic",
                "inputs": {"surface": "data/square_torus.hts", "p": "P0:0.1,0.1", "q": "P0:0.4,0.5"},
                "svg": "out.svg",
                "seed": 20240229,
                "tolerance": None
            }

        Returns:
            Dict: status, verdict, report and the session event log
        """
        config = run_config if isinstance(run_config, RunConfig) else RunConfig.model_validate(run_config)
        session_id = self._create_session()
        operation = config.subcommand

        self._log_event("Coordinator", "INFO", f"Starting {operation} - Session: {session_id}")

        # ===== STEP 1: LOAD INPUTS =====
        self._log_event("Coordinator", "INFO", "STEP 1: Load inputs")
        try:
            inputs = self.load_inputs(config.inputs, operation)
        except (GeometryError, OSError, ValueError) as e:
            return self._pipeline_failed("Load", str(e), e)

        # ===== STEP 2: DISPATCH =====
        try:
            agent = self._agent_for(operation)
        except ValueError as e:
            return self._pipeline_failed("Dispatch", str(e), e)
        self._log_event("Coordinator", "INFO", f"STEP 2: {agent.agent_name}")
        result = agent.safe_process({
            **inputs,
            "operation": operation,
            "seed": config.seed,
            "tolerance": config.tolerance,
        })
        if result.get("status") == "error":
            return self._pipeline_failed(agent.agent_name, result.get("error"), None, result)

        # ===== STEP 3: RENDER =====
        svg_path = None
        if config.svg is not None:
            self._log_event("Coordinator", "INFO", "STEP 3: Render figure")
            if result.get("scene") is None:
                self._log_event("Coordinator", "WARNING", f"{operation} has no figure; --svg ignored")
            else:
                try:
                    svg_path = render_svg(result["scene"], config.svg)
                except (OSError, PreconditionError) as e:
                    return self._pipeline_failed("Render", str(e), e)

        # ===== STEP 4: CONSOLIDATE =====
        return self._consolidate_results(config, agent.agent_name, result, svg_path)

    def _consolidate_results(self, config: RunConfig, agent_name: str, result: Dict, svg_path: Optional[Path]) -> Dict:
        verdict = result.get("verdict")
        tolerance = result["report"]["tolerance"] if verdict is not None else config.tolerance
        level = "ERROR" if verdict is False else "SUCCESS"
        self._log_event("Coordinator", level, f"{config.subcommand} finished with verdict {verdict}")
        return {
            "status": "COMPLETED",
            "session_id": self.current_session,
            "subcommand": config.subcommand,
            "agent": agent_name,
            "seed": config.seed,
            "tolerance": tolerance,
            "verdict": verdict,
            "report": result.get("report"),
            "svg": str(svg_path) if svg_path else None,
            "timestamp": datetime.now().isoformat(),
            "event_log": self.event_log,
        }

    def envelope(self, outcome: Dict) -> ReportEnvelope:
        """The deterministic part of a completed run, as written by --json."""
        return ReportEnvelope(
            subcommand=outcome["subcommand"],
            seed=outcome["seed"],
            tolerance=outcome["tolerance"],
            verdict=outcome["verdict"],
            report=to_jsonable(outcome["report"]),
        )

    def _pipeline_failed(
        self,
        failed_stage: str,
        error: str,
        exception: Optional[Exception] = None,
        agent_result: Optional[Dict] = None,
    ) -> Dict:
        """
        Handle pipeline failure gracefully.
        """
        self._log_event("Coordinator", "ERROR", f"Pipeline failed at {failed_stage}: {error}")

        if agent_result is not None:
            error_type = agent_result.get("error_type", "UnknownError")
            hypothesis = agent_result.get("hypothesis")
        else:
            error_type = type(exception).__name__ if exception else "UnknownError"
            hypothesis = getattr(exception, "hypothesis", None)

        return {
            "status": "FAILED",
            "failed_at": failed_stage,
            "error": error,
            "error_type": error_type,
            "hypothesis": hypothesis,
            "session_id": self.current_session,
            "timestamp": datetime.now().isoformat(),
            "event_log": self.event_log,
        }

    def _create_session(self) -> str:
        """Create unique session ID."""
        session_id = f"SES{datetime.now().strftime('%Y%m%d%H%M%S')}{random.randint(1000, 9999)}"
        self.current_session = session_id
        self.event_log = []
        return session_id

    def _log_event(
        self,
        agent_name: str,
        level: str,
        message: str,
        metadata: Optional[Dict] = None
    ) -> None:
        """
        Log event for observability.

        Args:
            agent_name: Name of the agent logging
            level: Log level (DEBUG, INFO, WARNING, ERROR, SUCCESS, CRITICAL)
            message: Log message
            metadata: Optional additional data
        """
        event = {
            "timestamp": datetime.now().isoformat(),
            "agent": agent_name,
            "level": level,
            "message": message
        }

        if metadata:
            event["metadata"] = metadata

        self.event_log.append(event)
        logger.log(_LEVELS.get(level, 20), f"[{level}] {agent_name}: {message}")

    def get_event_log(self) -> List[Dict]:
        """Get complete event log for current session."""
        return self.event_log

    def clear_event_log(self) -> None:
        """Clear event log (for new session)."""
        self.event_log = []

    def export_session(self, output_path: Union[str, Path]) -> None:
        """
        Export complete session data to JSON file.

        Args:
            output_path: Path to save session JSON
        """
        session_data = {
            "session_id": self.current_session,
            "event_log": to_jsonable(self.event_log),
            "exported_at": datetime.now().isoformat()
        }

        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(session_data, f, indent=2)

        self._log_event("Coordinator", "INFO", f"Session exported to {output_path}")


# ============= DEMO & TESTING =============

def demo_coordinator():
    """Demonstrate Coordinator usage."""

    print("=" * 70)
    print("COORDINATOR - Operation Dispatch Demo")
    print("=" * 70)

    coordinator = Coordinator()
    print(f"\n🔧 OPERATIONS: {', '.join(coordinator.operations())}")

    for subcommand, inputs in [
        ("validate", {"surface": "octagon"}),
        ("gaussbonnet", {"surface": "square_torus", "subdivisions": 5}),
        ("el", {"surface": "cylinder_c2"}),
        ("grunsky", {"z": 0.5, "samples": 200}),
    ]:
        outcome = coordinator.execute_pipeline({"subcommand": subcommand, "inputs": inputs})
        print(f"  {subcommand:12s} {outcome['status']:10s} verdict={outcome.get('verdict')}")

    print("\n📊 EVENT LOG:")
    for event in coordinator.get_event_log()[:8]:
        print(f"  [{event['level']}] {event['agent']}: {event['message']}")

    print("\n" + "=" * 70)


if __name__ == "__main__":
    demo_coordinator()
