"""
Environment interface shared by the particle and grid-world scenarios.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Sequence, Union

import numpy as np

from src.models.domain import ScenarioSpec
from src.utils.errors import DimensionError, ScenarioError

Seed = Union[int, np.random.SeedSequence]


def make_rng(seed: Seed) -> np.random.Generator:
    """Counter-based generator so streams are reproducible across platforms."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class StepResult:
    """
    Outcome of one environment step.

    @param observations - One observation vector per agent
    @param reward - Shared team reward
    @param done - True once the episode is over
    """
    observations: List[np.ndarray]
    reward: float
    done: bool


class Env(ABC):
    """
    Base class of every scenario.

    Subclasses implement reset, step and observe; this class keeps the
    step counter, validates actions and checks observation dimensions.

    @param spec - Static scenario description
    @param seed - Seed or seed sequence of the environment stream
    """
    def __init__(self, spec: ScenarioSpec, seed: Seed):
        self.spec = spec
        self.rng = make_rng(seed)
        self.t = 0

    @property
    def n_agents(self) -> int:
        return self.spec.n_agents

    @property
    def max_steps(self) -> int:
        return self.spec.max_steps

    @abstractmethod
    def reset(self) -> List[np.ndarray]:
        """Start a new episode and return the initial joint observation."""

    @abstractmethod
    def step(self, actions: Sequence[int]) -> StepResult:
        """Advance one step with one discrete action per agent."""

    @abstractmethod
    def observe(self, agent: int) -> np.ndarray:
        """Observation vector of one agent in the current state."""

    @abstractmethod
    def snapshot(self) -> List[Dict[str, List[float]]]:
        """Per-agent physical state (pos, vel) for trajectory dumps."""

    def joint_observation(self) -> List[np.ndarray]:
        """Observations of all agents, checked against the scenario dims."""
        joint = []
        for i in range(self.n_agents):
            obs = np.asarray(self.observe(i), dtype=float)
            if obs.shape != (self.spec.obs_dims[i],):
                raise DimensionError(f"observe[{i}]", (self.spec.obs_dims[i],), obs.shape)
            joint.append(obs)
        return joint

    def _check_agent(self, agent: int) -> None:
        if not 0 <= agent < self.n_agents:
            raise ScenarioError(
                f"Agent index {agent} out of range for {self.spec.scenario_id.value}",
                {"agent": agent, "n_agents": self.n_agents},
            )

    def _check_actions(self, actions: Sequence[int]) -> List[int]:
        if len(actions) != self.n_agents:
            raise ScenarioError(
                f"Expected {self.n_agents} actions, got {len(actions)}",
                {"expected": self.n_agents, "got": len(actions)},
            )
        checked = []
        for i, a in enumerate(actions):
            a = int(a)
            if not 0 <= a < self.spec.action_counts[i]:
                raise ScenarioError(
                    f"Action {a} out of range for agent {i}",
                    {"agent": i, "action": a, "action_count": self.spec.action_counts[i]},
                )
            checked.append(a)
        return checked
