"""
Data models shared across the workbench
"""

from src.models.domain import (
    Algorithm,
    EvalReport,
    MetricPoint,
    RunMetrics,
    ScenarioId,
    ScenarioSpec,
    StrategyId,
)
from src.models.config import ExperimentConfig, load_config
