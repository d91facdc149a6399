"""
Per-agent execution-time imputation with the shared predictive model.
"""
from typing import List, Optional

import numpy as np

from src.comms.channel import SharedView
from src.utils.errors import ConfigError, DimensionError, ProtocolViolation
from src.worldmodel.model import PredictiveModel, model_forward


class AgentModelInstance:
    """
    Agent i's private copy of the recurrent state and running estimate.

    Parameters are shared with the model and never written here.

    @param model - Shared predictor
    @param agent - Index of the owning agent
    """
    def __init__(self, model: PredictiveModel, agent: int):
        if not 0 <= agent < model.spec.n_agents:
            raise ProtocolViolation(f"Agent index {agent} out of range", {"agent": agent})
        self.model = model
        self.agent = agent
        self.h: Optional[np.ndarray] = None
        self.c: Optional[np.ndarray] = None
        self.estimate: Optional[np.ndarray] = None
        self.prediction: Optional[np.ndarray] = None
        self.steps = 0

    @property
    def is_reset(self) -> bool:
        return self.h is not None


def instance_reset(inst: AgentModelInstance) -> None:
    """Zero the recurrent state and forget the estimate and prediction."""
    inst.h, inst.c = inst.model.initial_state(1)
    inst.estimate = None
    inst.prediction = None
    inst.steps = 0


def instance_step(inst: AgentModelInstance, view: SharedView) -> np.ndarray:
    """
    Complete the joint observation and advance the recurrent state.

    Present slots take the received observation; absent slots take the
    prediction made on the previous step. The completed vector is then fed
    through the model, whose mean delta gives the next prediction.

    @param inst - Instance of agent view.agent
    @param view - What the agent received this step
    @return Completed joint observation (D,)
    """
    if not inst.is_reset:
        raise ProtocolViolation("instance_step called before instance_reset", {"agent": inst.agent})
    if view.agent != inst.agent:
        raise ProtocolViolation(
            f"View of agent {view.agent} given to the instance of agent {inst.agent}",
            {"view_agent": view.agent, "instance_agent": inst.agent},
        )
    if not view.present[inst.agent]:
        raise ProtocolViolation("An agent always holds its own observation", {"agent": inst.agent})
    spec = inst.model.spec
    slots: List[np.ndarray] = []
    for j, sl in enumerate(spec.obs_slices()):
        obs = view.observations[j]
        if obs is not None:
            if obs.shape != (spec.obs_dims[j],):
                raise DimensionError(f"instance_step.slot{j}", (spec.obs_dims[j],), obs.shape)
            slots.append(obs)
        elif inst.prediction is None:
            raise ProtocolViolation(
                f"Slot {j} is absent and there is no prediction yet",
                {"agent": inst.agent, "slot": j, "step": inst.steps},
            )
        else:
            slots.append(inst.prediction[sl])
    completed = np.concatenate(slots)
    out = model_forward(inst.model, completed[None, :], (inst.h, inst.c))
    inst.h, inst.c = out.state[0].data, out.state[1].data
    inst.prediction = completed + out.mean_delta()[0]
    inst.estimate = completed
    inst.steps += 1
    return completed.copy()


def rollout_predict(inst: AgentModelInstance, k: int) -> np.ndarray:
    """
    Predict k steps ahead fully auto-regressively from the instance's state.

    The instance itself is left untouched.

    @param inst - Instance that has processed at least one step
    @param k - Horizon
    @return (k, D) predicted joint observations; row 0 is the stored next-step prediction
    """
    if k < 1:
        raise ConfigError("Rollout horizon must be at least 1", {"k": k})
    if inst.prediction is None:
        raise ProtocolViolation("rollout_predict needs an instance that has stepped", {"agent": inst.agent})
    state = (inst.h.copy(), inst.c.copy())
    x = inst.prediction.copy()
    trajectory = [x]
    for _ in range(k - 1):
        out = model_forward(inst.model, x[None, :], state)
        state = (out.state[0].data, out.state[1].data)
        x = x + out.mean_delta()[0]
        trajectory.append(x)
    return np.stack(trajectory)
