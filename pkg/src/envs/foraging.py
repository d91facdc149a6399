"""
Cooperative level-based foraging on a square grid, with agents observing
absolute positions.
"""
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.envs.base import Env, Seed, StepResult
from src.models.domain import ScenarioId, ScenarioSpec
from src.utils.errors import ScenarioError

N_AGENTS = 2
N_FOODS = 2
SIGHT = 2
MAX_STEPS = 50
MAX_AGENT_LEVEL = 2
OBS_DIM = 3 + 3 * N_FOODS + 3


class Action(IntEnum):
    NONE = 0
    NORTH = 1
    SOUTH = 2
    WEST = 3
    EAST = 4
    LOAD = 5


MOVES = {
    Action.NONE: (0, 0),
    Action.NORTH: (-1, 0),
    Action.SOUTH: (1, 0),
    Action.WEST: (0, -1),
    Action.EAST: (0, 1),
    Action.LOAD: (0, 0),
}


@dataclass
class GridWorld:
    """
    Grid state; cells are (row, col) integer pairs.
    """
    size: int
    agent_positions: np.ndarray
    agent_levels: np.ndarray
    food_positions: np.ndarray
    food_levels: np.ndarray
    food_alive: np.ndarray
    sight: int = SIGHT
    max_steps: int = MAX_STEPS
    t: int = 0

    @property
    def total_food_level(self) -> int:
        return int(self.food_levels.sum())

    def in_sight(self, agent: int, cell: np.ndarray) -> bool:
        return bool(np.max(np.abs(cell - self.agent_positions[agent])) <= self.sight)

    def occupied(self) -> set:
        cells = {tuple(p) for p in self.agent_positions}
        cells |= {tuple(p) for p, alive in zip(self.food_positions, self.food_alive) if alive}
        return cells


class ForagingEnv(Env):
    """
    Two agents with levels in {1, 2} must jointly load foods whose level is
    the sum of both agents' levels. Collecting a food pays its share of the
    total food level, so a perfect episode returns exactly 1.

    @param spec - Scenario description
    @param seed - Environment stream seed
    @param size - Grid side length
    """
    def __init__(self, spec: ScenarioSpec, seed: Seed, size: int = 15):
        super().__init__(spec, seed)
        if size < 4:
            raise ScenarioError("Foraging grid must be at least 4x4", {"size": size})
        self.size = size
        self.world = self._spawn()

    @staticmethod
    def make_spec(size: int = 15, max_steps: Optional[int] = None) -> ScenarioSpec:
        return ScenarioSpec(
            scenario_id=ScenarioId.LBF if size == 15 else ScenarioId.LBF8,
            agent_names=["agent0", "agent1"],
            obs_dims=[OBS_DIM] * N_AGENTS,
            action_counts=[len(Action)] * N_AGENTS,
            max_steps=max_steps or MAX_STEPS,
            reward="food level / total food level on collection",
        )

    def _spawn(self) -> GridWorld:
        size = self.size
        interior = [(r, c) for r in range(1, size - 1) for c in range(1, size - 1)]
        food_idx = self.rng.choice(len(interior), size=N_FOODS, replace=False)
        foods = np.array([interior[k] for k in food_idx], dtype=int)
        taken = {tuple(f) for f in foods}
        free = [(r, c) for r in range(size) for c in range(size) if (r, c) not in taken]
        agent_idx = self.rng.choice(len(free), size=N_AGENTS, replace=False)
        agents = np.array([free[k] for k in agent_idx], dtype=int)
        levels = self.rng.integers(1, MAX_AGENT_LEVEL + 1, size=N_AGENTS)
        return GridWorld(
            size=size,
            agent_positions=agents,
            agent_levels=levels,
            food_positions=foods,
            food_levels=np.full(N_FOODS, int(levels.sum())),
            food_alive=np.ones(N_FOODS, dtype=bool),
            max_steps=self.max_steps,
        )

    def reset(self) -> List[np.ndarray]:
        self.t = 0
        self.world = self._spawn()
        return self.joint_observation()

    def _move(self, actions: List[int]) -> None:
        w = self.world
        foods = {tuple(p) for p, alive in zip(w.food_positions, w.food_alive) if alive}
        targets = []
        for i, a in enumerate(actions):
            dr, dc = MOVES[Action(a)]
            r, c = w.agent_positions[i] + np.array([dr, dc])
            inside = 0 <= r < w.size and 0 <= c < w.size
            targets.append((r, c) if inside and (r, c) not in foods else tuple(w.agent_positions[i]))
        for i, target in enumerate(targets):
            if targets.count(target) == 1:
                w.agent_positions[i] = target

    def _load(self, actions: List[int]) -> float:
        w = self.world
        reward = 0.0
        loaders = [i for i, a in enumerate(actions) if a == Action.LOAD]
        for k in range(len(w.food_positions)):
            if not w.food_alive[k]:
                continue
            adjacent = [
                i for i in loaders
                if int(np.abs(w.agent_positions[i] - w.food_positions[k]).sum()) == 1
            ]
            if adjacent and int(w.agent_levels[adjacent].sum()) >= int(w.food_levels[k]):
                w.food_alive[k] = False
                reward += float(w.food_levels[k]) / w.total_food_level
        return reward

    def step(self, actions: Sequence[int]) -> StepResult:
        actions = self._check_actions(actions)
        if self.t >= self.max_steps or not self.world.food_alive.any():
            raise ScenarioError("Episode is over; call reset()", {"t": self.t})
        reward = self._load(actions)
        self._move(actions)
        self.t += 1
        self.world.t = self.t
        done = self.t >= self.max_steps or not self.world.food_alive.any()
        return StepResult(self.joint_observation(), reward, done)

    def observe(self, agent: int) -> np.ndarray:
        self._check_agent(agent)
        w = self.world
        own = w.agent_positions[agent]
        obs = [float(own[0]), float(own[1]), float(w.agent_levels[agent])]
        # fixed-width: worlds with fewer foods report the missing ones as unseen
        for k in range(N_FOODS):
            if k < len(w.food_positions) and w.food_alive[k] and w.in_sight(agent, w.food_positions[k]):
                food = w.food_positions[k]
                rel = food - own + w.sight
                obs += [float(rel[0]), float(rel[1]), float(w.food_levels[k])]
            else:
                obs += [-1.0, -1.0, -1.0]
        other = 1 - agent
        if w.in_sight(agent, w.agent_positions[other]):
            pos = w.agent_positions[other]
            obs += [float(pos[0]), float(pos[1]), float(w.agent_levels[other])]
        else:
            obs += [-1.0, -1.0, -1.0]
        return np.array(obs)

    def snapshot(self) -> List[Dict[str, List[float]]]:
        return [
            {"pos": self.world.agent_positions[i].astype(float).tolist(), "vel": [0.0, 0.0]}
            for i in range(self.n_agents)
        ]
