"""
Domain models shared across the workbench
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator


class ScenarioId(str, Enum):
    """
    Scenario identifiers as accepted on the command line
    """
    SL = "sl"
    HS = "hs"
    SXY2 = "sxy2"
    SXY4 = "sxy4"
    SBF = "sbf"
    LBF = "lbf"
    LBF8 = "lbf8"
    CV2 = "cv2"

    @property
    def is_foraging(self) -> bool:
        return self in (ScenarioId.LBF, ScenarioId.LBF8)


class Algorithm(str, Enum):
    """
    Value-based training algorithms
    """
    IQL = "iql"
    QMIX = "qmix"


class StrategyId(str, Enum):
    """
    Input-construction strategies for the controllers
    """
    OBS = "obs"
    ORACLE = "oracle"
    MASKED_JOINT = "masked_joint"
    MD = "md"
    MD_MASKS = "md_masks"
    MARO = "maro"
    MARO_DROP = "maro_drop"

    @property
    def uses_model(self) -> bool:
        """Only the MARO strategies train and query a predictive model."""
        return self in (StrategyId.MARO, StrategyId.MARO_DROP)

    @property
    def drops_in_training(self) -> bool:
        """Strategies whose training inputs suffer sampled observation drops."""
        return self in (StrategyId.MD, StrategyId.MD_MASKS, StrategyId.MARO_DROP)


class ScenarioSpec(BaseModel):
    """
    Static description of a scenario

    @param scenario_id - Scenario identifier
    @param agent_names - One label per agent
    @param obs_dims - Observation dimension per agent
    @param action_counts - Number of discrete actions per agent
    @param max_steps - Episode length limit
    @param reward - Human readable reward definition
    """
    scenario_id: ScenarioId
    agent_names: List[str]
    obs_dims: List[int]
    action_counts: List[int]
    max_steps: int = Field(gt=0)
    reward: str

    @model_validator(mode="after")
    def _check_agents(self) -> "ScenarioSpec":
        n = len(self.agent_names)
        if n == 0 or len(self.obs_dims) != n or len(self.action_counts) != n:
            raise ValueError("agent_names, obs_dims and action_counts must have one entry per agent")
        if any(d < 1 for d in self.obs_dims):
            raise ValueError("observation dimensions must be positive")
        if any(a < 1 for a in self.action_counts):
            raise ValueError("every agent needs at least one action")
        return self

    @property
    def n_agents(self) -> int:
        return len(self.agent_names)

    @property
    def joint_obs_dim(self) -> int:
        return sum(self.obs_dims)

    def obs_slices(self) -> List[slice]:
        """Slice of each agent's block inside the concatenated joint observation."""
        slices, start = [], 0
        for d in self.obs_dims:
            slices.append(slice(start, start + d))
            start += d
        return slices


class EvalReport(BaseModel):
    """
    Result of a batch of greedy evaluation rollouts

    @param setting - Communication setting descriptor, e.g. "fixed:0.5"
    @param mean - Mean episodic return
    @param ci_lo - Lower bound of the bootstrap confidence interval
    @param ci_hi - Upper bound of the bootstrap confidence interval
    @param n - Number of rollouts
    @param returns - Individual episodic returns
    """
    setting: str
    mean: float
    ci_lo: float
    ci_hi: float
    n: int = Field(ge=1)
    returns: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_interval(self) -> "EvalReport":
        if not (self.ci_lo <= self.mean <= self.ci_hi):
            raise ValueError(f"confidence interval ({self.ci_lo}, {self.ci_hi}) does not contain mean {self.mean}")
        if self.returns and len(self.returns) != self.n:
            raise ValueError("n must equal the number of recorded returns")
        return self

    @property
    def width(self) -> float:
        return self.ci_hi - self.ci_lo


class MetricPoint(BaseModel):
    """
    One point of a training curve

    @param env_steps - Environment steps collected so far (the logical timestamp)
    @param eval_return - Mean evaluation return
    @param ci_lo - Lower bootstrap bound of the evaluation return
    @param ci_hi - Upper bootstrap bound of the evaluation return
    @param model_loss - Latest predictive model loss, if a model is trained
    @param td_loss - Latest controller TD loss
    @param epsilon - Exploration rate at this point
    """
    env_steps: int = Field(ge=0)
    eval_return: float
    ci_lo: float
    ci_hi: float
    model_loss: Optional[float] = None
    td_loss: Optional[float] = None
    epsilon: float = Field(ge=0.0, le=1.0)


class RunMetrics(BaseModel):
    """
    Training curve of one run
    """
    points: List[MetricPoint] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_order(self) -> "RunMetrics":
        steps = [p.env_steps for p in self.points]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError("env_steps must be strictly increasing")
        return self

    def append(self, point: MetricPoint) -> None:
        """Add a point, keeping env_steps strictly increasing."""
        if self.points and point.env_steps <= self.points[-1].env_steps:
            raise ValueError("env_steps must be strictly increasing")
        self.points.append(point)
