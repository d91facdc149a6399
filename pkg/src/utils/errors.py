"""
Exception hierarchy for the workbench.

Every error carries a short machine-readable code so the CLI can print a
single JSON line on failure.
"""
import json
from typing import Any, Dict, Optional


class WorkbenchError(Exception):
    """
    Base class for all expected failures.

    @param code - Machine-readable error code
    @param message - Human readable description
    @param details - Optional structured context
    """
    code = "workbench_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_json(self) -> str:
        """Serialize the error as one JSON line."""
        return json.dumps(
            {"error": self.code, "message": self.message, "details": self.details},
            default=str,
            sort_keys=True,
        )


class DimensionError(WorkbenchError):
    """Raised when tensor or observation shapes do not conform."""
    code = "dimension_mismatch"

    def __init__(self, op: str, expected: Any, got: Any):
        super().__init__(
            f"{op}: expected shape {expected}, got {got}",
            {"op": op, "expected": str(expected), "got": str(got)},
        )


class NumericalError(WorkbenchError):
    """Raised when an operation produces NaN or Inf."""
    code = "non_finite"


class ConfigError(WorkbenchError):
    """Raised for invalid configuration values or unknown identifiers."""
    code = "invalid_config"


class ScenarioError(WorkbenchError):
    """Raised for unknown scenarios, bad agent indices or invalid actions."""
    code = "invalid_scenario_input"


class ProtocolViolation(WorkbenchError):
    """Raised when an execution protocol is broken, e.g. oracle without full communication."""
    code = "protocol_violation"


class CheckpointError(WorkbenchError):
    """Raised when a checkpoint cannot be read, written or does not match."""
    code = "checkpoint_error"


class InsufficientDataError(WorkbenchError):
    """Raised when an operation needs samples that are not there."""
    code = "insufficient_data"
