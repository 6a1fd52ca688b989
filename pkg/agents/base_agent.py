"""
Base Agent Class for the Half-Translation Surface Workbench
Location: agents/base_agent.py

Provides common functionality for all agents:
- Standardized logging (callback or module logger)
- Input validation
- Error handling
- Timestamp management
- Operation dispatch for the geometry agents
"""

from abc import ABC, abstractmethod
from datetime import datetime
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from config import CLI_CONFIG
from utils.logger import get_logger
from utils.validators import validate_required_fields

logger = get_logger("agents")

_LEVELS = {
    "DEBUG": 10,
    "INFO": 20,
    "SUCCESS": 20,
    "WARNING": 30,
    "ERROR": 40,
}


class BaseAgent(ABC):
    """
    Abstract base class for all agents in the system.

    All agents must implement:
    - process(): Main processing method
    - _validate_input(): Input validation
    """

    def __init__(self, agent_name: str, log_callback: Optional[Callable] = None):
        """
        Initialize base agent.

        Args:
            agent_name: Name identifier for this agent
            log_callback: Optional function(agent_name, level, message, metadata)
        """
        self.agent_name = agent_name
        self.log_callback = log_callback
        self.start_time = None

    @abstractmethod
    def process(self, input_data: Dict) -> Dict:
        """
        Main processing method - must be implemented by subclass.

        Args:
            input_data: Operation name, loaded inputs and numeric options

        Returns:
            Dict: Standardized output
        """

    @abstractmethod
    def _validate_input(self, input_data: Dict) -> None:
        """
        Validate input data - must be implemented by subclass.

        Raises:
            ValueError: If validation fails
        """

    def _log(self, level: str, message: str, metadata: Optional[Dict] = None) -> None:
        """
        Log message with optional metadata.

        Args:
            level: Log level (DEBUG, INFO, SUCCESS, WARNING, ERROR)
            message: Log message
            metadata: Optional additional data to log
        """
        if self.log_callback:
            self.log_callback(self.agent_name, level, message, metadata)
            return

        prefix = {
            "INFO": "ℹ️",
            "SUCCESS": "✅",
            "WARNING": "⚠️",
            "ERROR": "❌",
            "DEBUG": "🔍"
        }.get(level, "•")
        suffix = f" {metadata}" if metadata else ""
        logger.log(_LEVELS.get(level, 20), f"{prefix} {self.agent_name}: {message}{suffix}")

    def _start_processing(self) -> None:
        """Mark processing start time."""
        self.start_time = datetime.now()
        self._log("DEBUG", f"{self.agent_name} started processing")

    def _end_processing(self, success: bool = True) -> None:
        if self.start_time:
            duration = (datetime.now() - self.start_time).total_seconds()
            level = "SUCCESS" if success else "ERROR"
            self._log(level, f"{self.agent_name} completed in {duration:.2f}s")

    def _create_output(self, data: Dict, status: str = "success") -> Dict:
        """
        Create standardized output format.

        Args:
            data: Output data from agent processing
            status: Processing status (success/error)

        Returns:
            Dict: Standardized output with metadata
        """
        output = {
            **data,
            "agent": self.agent_name,
            "status": status,
            "timestamp": datetime.now().isoformat()
        }

        if self.start_time:
            duration = (datetime.now() - self.start_time).total_seconds()
            output["processing_time_seconds"] = round(duration, 3)

        return output

    def _error_response(self, error_msg: str, exception: Optional[Exception] = None) -> Dict:
        """
        Create standardized error response.

        The error_type is the exception class name; the command line maps it
        to an exit code.
        """
        self._log("ERROR", f"Error in {self.agent_name}: {error_msg}")

        error_data = {
            "error": error_msg,
            "error_type": type(exception).__name__ if exception else "UnknownError",
            "agent": self.agent_name,
            "status": "error",
            "timestamp": datetime.now().isoformat()
        }
        hypothesis = getattr(exception, "hypothesis", None)
        if hypothesis:
            error_data["hypothesis"] = hypothesis

        return error_data

    def _validate_required_fields(self, data: Dict, required_fields: List[str]) -> None:
        validate_required_fields(data, required_fields)

    def safe_process(self, input_data: Dict) -> Dict:
        """
        Wrapper around process() with error handling.

        Returns:
            Dict: Either successful output or error response
        """
        try:
            self._start_processing()
            result = self.process(input_data)
            self._end_processing(success=True)
            return result
        except Exception as e:
            self._end_processing(success=False)
            return self._error_response(str(e), e)

    def get_agent_info(self) -> Dict:
        return {
            "agent_name": self.agent_name,
            "agent_type": self.__class__.__name__,
            "capabilities": self._get_capabilities(),
            "status": "ready"
        }

    def _get_capabilities(self) -> list:
        """Override in subclasses to describe agent capabilities."""
        return ["process_data"]


# ============= OPERATION AGENTS =============

class GeometryAgent(BaseAgent):
    """
    Agent that serves a fixed set of named operations.

    Subclasses fill OPERATIONS with operation -> (handler name, required
    fields). A handler returns (report, verdict, scene): the report is any
    object the report writer understands, the verdict is True/False for a
    checked statement or None for a plain computation, and the scene is an
    optional utils.svg_render.Scene.
    """

    OPERATIONS: Dict[str, Tuple[str, List[str]]] = {}

    def process(self, input_data: Dict) -> Dict:
        self._validate_input(input_data)
        operation = input_data["operation"]
        handler_name, _ = self.OPERATIONS[operation]

        self._log("INFO", f"Running {operation}")
        report, verdict, scene = getattr(self, handler_name)(input_data)
        if verdict is not None and not (isinstance(report, dict) and "tolerance" in report):
            raise ValueError(f"{operation} gave a verdict without the tolerance it used")

        if verdict is False:
            self._log("WARNING", f"{operation} verdict failed")
        return self._create_output({
            "operation": operation,
            "report": report,
            "verdict": verdict,
            "scene": scene,
        })

    def _validate_input(self, input_data: Dict) -> None:
        self._validate_required_fields(input_data, ["operation"])
        operation = input_data["operation"]
        if operation not in self.OPERATIONS:
            raise ValueError(
                f"{self.agent_name} does not handle '{operation}'; known: {', '.join(sorted(self.OPERATIONS))}"
            )
        self._validate_required_fields(input_data, self.OPERATIONS[operation][1])

    def _rng(self, input_data: Dict) -> np.random.Generator:
        seed = input_data.get("seed")
        return np.random.default_rng(CLI_CONFIG["default_seed"] if seed is None else seed)

    def _tolerance(self, input_data: Dict, default: float) -> float:
        tolerance = input_data.get("tolerance")
        return default if tolerance is None else float(tolerance)

    def handles(self, operation: str) -> bool:
        return operation in self.OPERATIONS

    def _get_capabilities(self) -> list:
        return sorted(self.OPERATIONS)
