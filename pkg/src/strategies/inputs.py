"""
What each agent's controller sees, per strategy, at training and at execution time.

Controller inputs are the per-agent observation slots concatenated in agent
order; md_masks appends one presence flag per agent.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.comms.channel import CommChannel, SharedView, shared_view
from src.comms.schemes import CommScheme
from src.models.domain import ScenarioSpec, StrategyId
from src.utils.errors import ConfigError, ProtocolViolation, ScenarioError
from src.worldmodel.instance import AgentModelInstance, instance_step

JOINT_STRATEGIES = (
    StrategyId.ORACLE,
    StrategyId.MASKED_JOINT,
    StrategyId.MD,
    StrategyId.MARO,
    StrategyId.MARO_DROP,
)


def _strategy(value) -> StrategyId:
    try:
        return StrategyId(value)
    except ValueError:
        raise ConfigError(f"Unknown strategy '{value}'", {"strategy": str(value)}) from None


def input_dim(strategy: StrategyId, spec: ScenarioSpec, agent: int) -> int:
    """
    Controller input dimension of one agent.

    @param strategy - Input strategy
    @param spec - Scenario
    @param agent - Agent index
    """
    strategy = _strategy(strategy)
    if not 0 <= agent < spec.n_agents:
        raise ScenarioError(f"Agent index {agent} out of range", {"agent": agent})
    if strategy == StrategyId.OBS:
        return spec.obs_dims[agent]
    if strategy == StrategyId.MD_MASKS:
        return spec.joint_obs_dim + spec.n_agents
    return spec.joint_obs_dim


def zero_filled(view: SharedView, spec: ScenarioSpec) -> np.ndarray:
    """Concatenated view with absent slots replaced by zeros."""
    return np.concatenate([
        obs if obs is not None else np.zeros(spec.obs_dims[j])
        for j, obs in enumerate(view.observations)
    ])


def build_exec_input(
    strategy: StrategyId,
    agent: int,
    view: SharedView,
    spec: ScenarioSpec,
    inst: Optional[AgentModelInstance] = None,
) -> np.ndarray:
    """
    Controller input of one agent at one execution step.

    @param strategy - Input strategy
    @param agent - Agent index; must own the view
    @param view - What the agent received this step
    @param spec - Scenario
    @param inst - The agent's model instance (maro strategies)
    @return Input vector of length input_dim(strategy, spec, agent)
    """
    strategy = _strategy(strategy)
    if view.agent != agent:
        raise ProtocolViolation(f"View of agent {view.agent} used for agent {agent}", {"agent": agent})
    if strategy == StrategyId.OBS:
        return view.observations[agent].copy()
    if strategy == StrategyId.ORACLE:
        if not view.is_complete:
            missing = [j for j, present in enumerate(view.present) if not present]
            raise ProtocolViolation(
                "Oracle inputs need every observation", {"agent": agent, "missing": missing}
            )
        return np.concatenate(view.observations)
    if strategy in (StrategyId.MASKED_JOINT, StrategyId.MD):
        return zero_filled(view, spec)
    if strategy == StrategyId.MD_MASKS:
        return np.concatenate([zero_filled(view, spec), view.present.astype(float)])
    if inst is None:
        raise ConfigError(f"Strategy {strategy.value} needs a predictive model instance", {"agent": agent})
    return instance_step(inst, view)


def build_train_input(
    strategy: StrategyId,
    spec: ScenarioSpec,
    joint_obs: Sequence[np.ndarray],
    mask: np.ndarray,
    instances: Optional[Sequence[AgentModelInstance]] = None,
) -> Tuple[List[np.ndarray], np.ndarray]:
    """
    Controller inputs of every agent at one training step.

    oracle, masked_joint and maro see the full true joint observation; md and
    md_masks see `mask` applied with zeros; maro_drop fills dropped slots
    from its training-time model instances.

    @param strategy - Input strategy
    @param spec - Scenario
    @param joint_obs - True observation of every agent
    @param mask - Drop mask of this step; ignored by strategies that never drop
    @param instances - One model instance per agent (maro_drop)
    @return (inputs per agent, mask rows actually applied)
    """
    strategy = _strategy(strategy)
    n = spec.n_agents
    if strategy.drops_in_training:
        applied = np.array(mask, dtype=bool)
    else:
        applied = np.ones((n, n), dtype=bool)
    if strategy == StrategyId.MARO_DROP and (instances is None or len(instances) != n):
        raise ConfigError("maro_drop training needs one model instance per agent")
    inputs = []
    for i in range(n):
        view = shared_view(joint_obs, applied, i)
        if strategy in (StrategyId.ORACLE, StrategyId.MASKED_JOINT, StrategyId.MARO):
            inputs.append(np.concatenate(view.observations))
        elif strategy == StrategyId.MARO_DROP:
            inputs.append(instance_step(instances[i], view))
        else:
            inputs.append(build_exec_input(strategy, i, view, spec))
    return inputs, applied


class TrainingDropout:
    """
    Episode-level drop process of the md, md_masks and maro_drop strategies:
    a communication matrix drawn per episode under the training scheme and
    independent per-step Bernoulli drops per receiving agent.

    @param scheme - Training scheme, usually `default` (p ~ U(0, 1) per episode)
    @param n_agents - Number of agents
    @param rng - Drop stream
    """
    def __init__(self, scheme: CommScheme, n_agents: int, rng: np.random.Generator):
        self.channel = CommChannel(scheme, n_agents, rng)

    def reset(self) -> Optional[float]:
        """Draw the episode's matrix; returns the drawn p."""
        self.channel.reset()
        return self.channel.p_drawn

    def mask(self, t: int) -> np.ndarray:
        return self.channel.mask(t)
