"""
Experiment configuration models and the flat key=value config loader
"""
import os
from pathlib import Path
from typing import Annotated, Any, Dict, List, Mapping, Optional, Union

from dotenv import dotenv_values
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.comms.schemes import CommScheme
from src.models.domain import Algorithm, ScenarioId, StrategyId
from src.utils.errors import ConfigError

# (algorithm, foraging?) -> (learning rate, epsilon anneal steps)
TABLE_DEFAULTS = {
    (Algorithm.IQL, False): (5e-4, 500_000),
    (Algorithm.QMIX, False): (5e-4, 50_000),
    (Algorithm.IQL, True): (3e-4, 100_000),
    (Algorithm.QMIX, True): (1e-4, 100_000),
}

DEFAULT_FINAL_SCHEMES = ["default", "asymmetric", "dynamic:5"]


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


def _check_scheme(value: str) -> str:
    try:
        return str(CommScheme.parse(value))
    except ConfigError as e:
        raise ValueError(e.message) from e


SchemeString = Annotated[str, AfterValidator(_check_scheme)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class EnvSection(_Section):
    """
    Environment overrides

    @param max_steps - Episode length override; None keeps the scenario default
    @param collision_penalty - Penalty per colliding pair occurrence in particle tasks
    """
    max_steps: Optional[int] = Field(default=None, gt=0)
    collision_penalty: float = Field(default=1.0, ge=0.0)


class ControllerSection(_Section):
    """
    Q-learning hyperparameters, named after the hyperparameter tables

    @param learning_rate - Adam learning rate; None takes the table default
    @param epsilon_anneal - Exploration anneal length in env steps; None takes the table default
    """
    learning_rate: Optional[float] = Field(default=None, gt=0.0)
    epsilon_start: float = Field(default=1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(default=0.05, ge=0.0, le=1.0)
    epsilon_anneal: Optional[int] = Field(default=None, gt=0)
    target_update: int = Field(default=200, gt=0)
    hidden_dim: int = Field(default=256, gt=0)
    reward_standardisation: bool = True
    gamma: float = Field(default=0.99, ge=0.0, le=1.0)
    batch_size: int = Field(default=32, gt=0)
    buffer_size: int = Field(default=5000, gt=0)
    grad_clip: Optional[float] = Field(default=None, gt=0.0)
    mixer_embed_dim: int = Field(default=32, gt=0)
    mixer_hypernet_dim: int = Field(default=64, gt=0)


class WorldModelSection(_Section):
    """
    Predictive model hyperparameters
    """
    hidden_dim: int = Field(default=128, gt=0)
    lr: float = Field(default=1e-3, gt=0.0)
    grad_clip: float = Field(default=1.0, gt=0.0)
    buffer_size: int = Field(default=5000, gt=0)
    batch_size: int = Field(default=32, gt=0)


class CommSection(_Section):
    """
    Communication schemes

    @param train_scheme - Scheme of the training-time drop draws (md, md_masks, maro_drop)
    @param eval_scheme - Scheme used by periodic evaluation during training
    """
    train_scheme: SchemeString = "default"
    eval_scheme: SchemeString = "default"


class HarnessSection(_Section):
    """
    Training budget, evaluation cadence and statistics
    """
    total_env_steps: int = Field(default=200_000, gt=0)
    eval_interval: int = Field(default=10_000, gt=0)
    eval_rollouts: int = Field(default=20, gt=0)
    final_rollouts: int = Field(default=100, gt=0)
    bootstrap_resamples: int = Field(default=10_000, gt=0)
    final_schemes: List[SchemeString] = Field(default_factory=lambda: list(DEFAULT_FINAL_SCHEMES))

    @field_validator("final_schemes", mode="before")
    @classmethod
    def _split_schemes(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("final_schemes")
    @classmethod
    def _check_final_schemes(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("final_schemes must not be empty")
        return value


class ExperimentConfig(BaseModel):
    """
    Full description of one experiment; one run is launched per seed

    @param scenario - Scenario id
    @param algorithm - iql or qmix
    @param strategy - Input-construction strategy
    @param seeds - Master seeds, one run each
    @param output_dir - Directory that receives the run directories
    """
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    scenario: ScenarioId
    algorithm: Algorithm = Algorithm.IQL
    strategy: StrategyId = StrategyId.MARO
    seeds: List[int] = Field(default_factory=lambda: [0])
    output_dir: str = Field(default_factory=lambda: os.getenv("HMARL_OUTPUT_DIR", "runs"))
    env: EnvSection = Field(default_factory=EnvSection)
    controllers: ControllerSection = Field(default_factory=ControllerSection)
    worldmodel: WorldModelSection = Field(default_factory=WorldModelSection)
    comms: CommSection = Field(default_factory=CommSection)
    harness: HarnessSection = Field(default_factory=HarnessSection)

    @field_validator("seeds", mode="before")
    @classmethod
    def _split_seeds(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("at least one seed is required")
        if any(s < 0 for s in value):
            raise ValueError("seeds must be non-negative")
        return value

    @model_validator(mode="after")
    def _fill_table_defaults(self) -> "ExperimentConfig":
        lr, anneal = TABLE_DEFAULTS[(self.algorithm, self.scenario.is_foraging)]
        if self.controllers.learning_rate is None:
            self.controllers.learning_rate = lr
        if self.controllers.epsilon_anneal is None:
            self.controllers.epsilon_anneal = anneal
        return self

    def run_name(self, seed: int) -> str:
        """Directory name of the run for one seed."""
        return f"{self.scenario.value}-{self.algorithm.value}-{self.strategy.value}-seed{seed}"

    def for_seed(self, seed: int) -> "ExperimentConfig":
        """Copy of this config restricted to a single seed."""
        return self.model_copy(update={"seeds": [seed]}, deep=True)


SECTIONS = ("env", "controllers", "worldmodel", "comms", "harness")


def nest_flat(flat: Mapping[str, Optional[str]]) -> Dict[str, Any]:
    """
    Turn dotted keys into nested sections.

    @param flat - e.g. {"controllers.learning_rate": "0.0005", "scenario": "hs"}
    @return Nested dict ready for ExperimentConfig
    """
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        if value is None or value == "":
            raise ConfigError(f"Config key '{key}' has no value", {"key": key})
        section, dot, field = key.partition(".")
        if not dot:
            nested[key] = value
            continue
        if section not in SECTIONS or not field or "." in field:
            raise ConfigError(f"Unknown config key '{key}'", {"key": key})
        nested.setdefault(section, {})[field] = value
    return nested


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """
    Validate a nested mapping, wrapping pydantic errors as ConfigError.
    """
    try:
        return ExperimentConfig.model_validate(dict(values))
    except ValidationError as e:
        problems = [
            {"loc": ".".join(str(p) for p in err["loc"]), "msg": err["msg"]}
            for err in e.errors()
        ]
        raise ConfigError("Invalid experiment configuration", {"errors": problems}) from e


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Optional[str]]] = None,
) -> ExperimentConfig:
    """
    Load a flat key=value config file and apply overrides.

    @param path - Config file; None starts from overrides only
    @param overrides - Dotted key/value pairs applied after the file
    @return Validated configuration with table defaults filled in
    """
    flat: Dict[str, Optional[str]] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}", {"path": str(path)})
        flat.update(dotenv_values(path))
    if overrides:
        flat.update(overrides)
    return build_config(nest_flat(flat))
