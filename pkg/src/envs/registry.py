"""
Scenario registry: scenario ids to specs and environment instances.
"""
from typing import Optional, Union

from src.envs.base import Env, Seed
from src.envs.foraging import ForagingEnv
from src.envs.scenarios import (
    ConstantVelocityEnv,
    HearSeeEnv,
    SpeakerListenerEnv,
    SpreadBlindfoldEnv,
    SpreadXY2Env,
    SpreadXY4Env,
)
from src.models.domain import ScenarioId, ScenarioSpec
from src.utils.errors import ScenarioError

PARTICLE_SCENARIOS = {
    ScenarioId.HS: HearSeeEnv,
    ScenarioId.SXY2: SpreadXY2Env,
    ScenarioId.SXY4: SpreadXY4Env,
    ScenarioId.SBF: SpreadBlindfoldEnv,
    ScenarioId.SL: SpeakerListenerEnv,
    ScenarioId.CV2: ConstantVelocityEnv,
}

GRID_SIZES = {ScenarioId.LBF: 15, ScenarioId.LBF8: 8}


def _scenario_id(value: Union[str, ScenarioId]) -> ScenarioId:
    try:
        return ScenarioId(value)
    except ValueError:
        raise ScenarioError(f"Unknown scenario id '{value}'", {"scenario": str(value)}) from None


def scenario_spec(scenario: Union[str, ScenarioId], max_steps: Optional[int] = None) -> ScenarioSpec:
    """
    Static description of a scenario.

    @param scenario - Scenario id or its CLI spelling
    @param max_steps - Optional episode length override
    """
    sid = _scenario_id(scenario)
    if sid in GRID_SIZES:
        return ForagingEnv.make_spec(size=GRID_SIZES[sid], max_steps=max_steps)
    return PARTICLE_SCENARIOS[sid].make_spec(max_steps=max_steps)


def make_env(
    spec: Union[ScenarioSpec, str, ScenarioId],
    seed: Seed,
    collision_penalty: float = 1.0,
) -> Env:
    """
    Build an environment with its own deterministic random stream.

    @param spec - Scenario spec, or a scenario id for the default spec
    @param seed - Seed or seed sequence of the environment stream
    @param collision_penalty - Penalty per colliding pair occurrence (particle tasks)
    @return A reset environment
    """
    if not isinstance(spec, ScenarioSpec):
        spec = scenario_spec(spec)
    sid = spec.scenario_id
    if sid in GRID_SIZES:
        return ForagingEnv(spec, seed, size=GRID_SIZES[sid])
    return PARTICLE_SCENARIOS[sid](spec, seed, collision_penalty=collision_penalty)
