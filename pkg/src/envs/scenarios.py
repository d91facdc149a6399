"""
The particle scenarios: HearSee, SpreadXY-2, SpreadXY-4, SpreadBlindfold,
SpeakerListener and the scripted constant-velocity world.
"""
from typing import List, Optional

import numpy as np

from src.envs.particle import MAX_STEPS, ParticleEnv, ParticleWorld
from src.models.domain import ScenarioId, ScenarioSpec

N_SYMBOLS = 3
CV_MAX_SPEED = 0.5


class HearSeeEnv(ParticleEnv):
    """
    Two heterogeneous agents cover one landmark. "Hear" sees only the
    landmark; "See" sees both agents but not the landmark.
    """
    n_landmarks = 1
    collide = False

    @staticmethod
    def make_spec(max_steps: Optional[int] = None) -> ScenarioSpec:
        return ScenarioSpec(
            scenario_id=ScenarioId.HS,
            agent_names=["hear", "see"],
            obs_dims=[2, 8],
            action_counts=[5, 5],
            max_steps=max_steps or MAX_STEPS,
            reward="-sum over landmarks of the closest agent distance",
        )

    def observe(self, agent: int) -> np.ndarray:
        self._check_agent(agent)
        w = self.world
        if agent == 0:
            return w.landmarks[0].copy()
        return np.concatenate([w.positions.reshape(-1), w.velocities.reshape(-1)])


class SpreadXYEnv(ParticleEnv):
    """
    Teams of two: within a team the first agent observes the x components of
    both teammates' position and velocity, the second the y components.
    Everyone observes every landmark's absolute position.
    """
    n_teams = 1

    @classmethod
    def make_spec(cls, max_steps: Optional[int] = None) -> ScenarioSpec:
        n = 2 * cls.n_teams
        dim = 4 + 2 * n
        return ScenarioSpec(
            scenario_id=ScenarioId.SXY2 if cls.n_teams == 1 else ScenarioId.SXY4,
            agent_names=[f"team{k}_{axis}" for k in range(cls.n_teams) for axis in ("x", "y")],
            obs_dims=[dim] * n,
            action_counts=[5] * n,
            max_steps=max_steps or MAX_STEPS,
            reward="-sum over landmarks of the closest agent distance - collision penalty",
        )

    def observe(self, agent: int) -> np.ndarray:
        self._check_agent(agent)
        w = self.world
        team = [2 * (agent // 2), 2 * (agent // 2) + 1]
        axis = agent % 2
        return np.concatenate([
            w.positions[team, axis],
            w.velocities[team, axis],
            w.landmarks.reshape(-1),
        ])


class SpreadXY2Env(SpreadXYEnv):
    n_teams = 1
    n_landmarks = 2


class SpreadXY4Env(SpreadXYEnv):
    n_teams = 2
    n_landmarks = 4


class SpreadBlindfoldEnv(ParticleEnv):
    """
    Three agents cover three landmarks; each sees only itself and the landmarks.
    """
    n_landmarks = 3

    @staticmethod
    def make_spec(max_steps: Optional[int] = None) -> ScenarioSpec:
        return ScenarioSpec(
            scenario_id=ScenarioId.SBF,
            agent_names=["agent0", "agent1", "agent2"],
            obs_dims=[10, 10, 10],
            action_counts=[5, 5, 5],
            max_steps=max_steps or MAX_STEPS,
            reward="-sum over landmarks of the closest agent distance - collision penalty",
        )

    def observe(self, agent: int) -> np.ndarray:
        self._check_agent(agent)
        w = self.world
        return np.concatenate([w.positions[agent], w.velocities[agent], w.landmarks.reshape(-1)])


class SpeakerListenerEnv(ParticleEnv):
    """
    An immobile speaker sees the goal landmark and utters one of three
    symbols; the listener hears it on the next step and must reach the goal.
    """
    n_landmarks = 3
    collide = False

    @staticmethod
    def make_spec(max_steps: Optional[int] = None) -> ScenarioSpec:
        return ScenarioSpec(
            scenario_id=ScenarioId.SL,
            agent_names=["speaker", "listener"],
            obs_dims=[N_SYMBOLS, 2 + 2 * 3 + N_SYMBOLS],
            action_counts=[N_SYMBOLS, 5],
            max_steps=max_steps or MAX_STEPS,
            reward="-distance between the listener and the goal landmark",
        )

    def movable(self, agent: int) -> bool:
        return agent == 1

    def _on_reset(self) -> None:
        self.goal = int(self.rng.integers(self.n_landmarks))
        self.symbol = np.zeros(N_SYMBOLS)

    def _on_step(self, actions: List[int]) -> None:
        self.symbol = np.zeros(N_SYMBOLS)
        self.symbol[actions[0]] = 1.0

    def reward(self, actions: List[int]) -> float:
        gap = self.world.positions[1] - self.world.landmarks[self.goal]
        return float(-np.linalg.norm(gap))

    def observe(self, agent: int) -> np.ndarray:
        self._check_agent(agent)
        w = self.world
        if agent == 0:
            goal = np.zeros(N_SYMBOLS)
            goal[self.goal] = 1.0
            return goal
        relative = (w.landmarks - w.positions[1]).reshape(-1)
        return np.concatenate([w.velocities[1], relative, self.symbol])


class ConstantVelocityEnv(ParticleEnv):
    """
    Scripted toy world with known dynamics: two agents drift at a constant
    velocity drawn at reset, so Δ = [v dt, 0] exactly. Actions only point
    at the teammate and are scored, they never move anything.
    """
    n_landmarks = 1
    collide = False

    @staticmethod
    def make_spec(max_steps: Optional[int] = None) -> ScenarioSpec:
        return ScenarioSpec(
            scenario_id=ScenarioId.CV2,
            agent_names=["agent0", "agent1"],
            obs_dims=[4, 4],
            action_counts=[5, 5],
            max_steps=max_steps or MAX_STEPS,
            reward="-(agents not pointing at their teammate along the dominant axis) / n",
        )

    def _spawn(self) -> ParticleWorld:
        world = super()._spawn()
        world.velocities = self.rng.uniform(-CV_MAX_SPEED, CV_MAX_SPEED, size=(self.n_agents, 2))
        return world

    def _advance(self, actions: List[int]) -> None:
        # scored against the positions the agents observed
        wrong = sum(1 for i, a in enumerate(actions) if a != self.pointing_action(i))
        self._score = -wrong / self.n_agents
        self.world.positions = self.world.positions + self.world.velocities * self.world.dt

    def pointing_action(self, agent: int) -> int:
        """The action that points along the dominant axis toward the teammate."""
        gap = self.world.positions[1 - agent] - self.world.positions[agent]
        axis = int(np.argmax(np.abs(gap)))
        positive = gap[axis] >= 0
        return (1 if positive else 2) if axis == 0 else (3 if positive else 4)

    def reward(self, actions: List[int]) -> float:
        return self._score

    def observe(self, agent: int) -> np.ndarray:
        self._check_agent(agent)
        w = self.world
        return np.concatenate([w.positions[agent], w.velocities[agent]])

