"""
Continuous particle world: physics, collisions, the spread reward and the
base class of all particle scenarios.
"""
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from src.envs.base import Env, Seed, StepResult
from src.models.domain import ScenarioSpec
from src.utils.errors import DimensionError, NumericalError, ScenarioError

DT = 0.1
DAMPING = 0.25
ACCEL_GAIN = 5.0
AGENT_RADIUS = 0.15
ARENA = 1.0
MAX_STEPS = 25

# noop, +x, -x, +y, -y
ACTION_DIRECTIONS = np.array(
    [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
)


@dataclass
class ParticleWorld:
    """
    Physical state of a particle scenario. Units: m, m/s, s; unit mass.
    """
    positions: np.ndarray
    velocities: np.ndarray
    landmarks: np.ndarray
    dt: float = DT
    damping: float = DAMPING
    max_steps: int = MAX_STEPS
    t: int = 0

    @property
    def n_agents(self) -> int:
        return self.positions.shape[0]


def physics_step(world: ParticleWorld, forces: np.ndarray) -> ParticleWorld:
    """
    Integrate one step in place: v' = v(1 - damping) + F dt, x' = x + v' dt.

    @param world - State to advance
    @param forces - (n, 2) forces in N
    @return The same world, advanced
    """
    forces = np.asarray(forces, dtype=float)
    if forces.shape != world.positions.shape:
        raise DimensionError("physics_step", world.positions.shape, forces.shape)
    if not np.all(np.isfinite(forces)):
        raise NumericalError("physics_step received non-finite forces")
    world.velocities = world.velocities * (1.0 - world.damping) + forces * world.dt
    world.positions = world.positions + world.velocities * world.dt
    return world


def count_collisions(positions: np.ndarray, radius_sum: float = 2 * AGENT_RADIUS) -> int:
    """Number of unordered agent pairs closer than radius_sum."""
    positions = np.asarray(positions, dtype=float)
    n = positions.shape[0]
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(positions[i] - positions[j]) < radius_sum:
                pairs += 1
    return pairs


def spread_reward(
    agent_positions: np.ndarray,
    landmark_positions: np.ndarray,
    collisions: int,
    penalty: float = 1.0,
) -> float:
    """
    Coverage reward: minus the sum over landmarks of the closest agent's
    distance, minus the collision penalty.

    Each colliding pair is penalized once for each of its two agents.

    @param agent_positions - (n, 2)
    @param landmark_positions - (m, 2), m >= 1
    @param collisions - Number of colliding pairs this step
    @param penalty - Penalty per pair occurrence
    @return Team reward
    """
    landmarks = np.asarray(landmark_positions, dtype=float)
    if landmarks.ndim != 2 or landmarks.shape[0] == 0:
        raise ScenarioError("spread_reward needs at least one landmark")
    agents = np.asarray(agent_positions, dtype=float)
    dists = np.linalg.norm(agents[:, None, :] - landmarks[None, :, :], axis=-1)
    return float(-dists.min(axis=0).sum() - 2.0 * penalty * collisions)


class ParticleEnv(Env):
    """
    Particle scenario skeleton. Agents and landmarks spawn uniformly in the
    arena with zero velocity; actions map to unit directions scaled by the
    acceleration gain.

    Subclasses set the landmark count and implement observe(); they may
    override the reward, the set of movable agents or the integrator.
    """
    n_landmarks = 1
    collide = True

    def __init__(self, spec: ScenarioSpec, seed: Seed, collision_penalty: float = 1.0):
        super().__init__(spec, seed)
        self.collision_penalty = collision_penalty
        self.world: ParticleWorld = self._spawn()
        self._on_reset()

    def movable(self, agent: int) -> bool:
        return True

    def _spawn(self) -> ParticleWorld:
        n = self.n_agents
        positions = self.rng.uniform(-ARENA, ARENA, size=(n, 2))
        landmarks = self.rng.uniform(-ARENA, ARENA, size=(self.n_landmarks, 2))
        return ParticleWorld(
            positions=positions,
            velocities=np.zeros((n, 2)),
            landmarks=landmarks,
            max_steps=self.max_steps,
        )

    def _on_reset(self) -> None:
        """Hook for scenario-specific episode state."""

    def _on_step(self, actions: List[int]) -> None:
        """Hook run after the world advanced and before observing."""

    def reset(self) -> List[np.ndarray]:
        self.t = 0
        self.world = self._spawn()
        self._on_reset()
        return self.joint_observation()

    def forces(self, actions: Sequence[int]) -> np.ndarray:
        forces = ACTION_DIRECTIONS[np.asarray(actions, dtype=int)] * ACCEL_GAIN
        for i in range(self.n_agents):
            if not self.movable(i):
                forces[i] = 0.0
        return forces

    def _advance(self, actions: List[int]) -> None:
        physics_step(self.world, self.forces(actions))

    def reward(self, actions: List[int]) -> float:
        collisions = count_collisions(self.world.positions) if self.collide else 0
        return spread_reward(
            self.world.positions, self.world.landmarks, collisions, self.collision_penalty
        )

    def step(self, actions: Sequence[int]) -> StepResult:
        actions = self._check_actions(actions)
        if self.t >= self.max_steps:
            raise ScenarioError("Episode is over; call reset()", {"t": self.t})
        self._advance(actions)
        self.t += 1
        self.world.t = self.t
        reward = self.reward(actions)
        self._on_step(actions)
        return StepResult(self.joint_observation(), reward, self.t >= self.max_steps)

    def snapshot(self) -> List[Dict[str, List[float]]]:
        return [
            {"pos": self.world.positions[i].tolist(), "vel": self.world.velocities[i].tolist()}
            for i in range(self.n_agents)
        ]
