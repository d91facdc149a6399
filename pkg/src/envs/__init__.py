"""
Cooperative scenarios: particle tasks and grid-world foraging.
"""

from src.envs.base import Env, StepResult, make_rng
from src.envs.particle import ParticleWorld, count_collisions, physics_step, spread_reward
from src.envs.foraging import Action, ForagingEnv, GridWorld
from src.envs.registry import make_env, scenario_spec
from src.envs.trajectory import TrajectoryRecorder
