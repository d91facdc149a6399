"""
Centralized recurrent Gaussian predictor of next-step observation deltas.

An LSTM trunk reads the concatenated joint observation; one pair of linear
heads per agent emits the mean and log-variance of that agent's delta.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.diffcore import ops
from src.diffcore.nn import gaussian_nll, linear, lstm_cell
from src.diffcore.params import ParamStore, init_linear, init_lstm
from src.diffcore.tensor import ArrayLike, Tensor, as_tensor
from src.models.domain import ScenarioSpec
from src.utils.errors import DimensionError, InsufficientDataError

LOGVAR_MIN = -10.0
LOGVAR_MAX = 4.0

State = Tuple[ArrayLike, ArrayLike]


class PredictiveModel:
    """
    Shared parameters of the delta predictor.

    @param spec - Scenario whose observation layout the model predicts
    @param hidden_dim - LSTM trunk width
    @param rng - Initialization stream; None builds an all-zero model
    """
    def __init__(self, spec: ScenarioSpec, hidden_dim: int = 128, rng: Optional[np.random.Generator] = None):
        self.spec = spec
        self.hidden_dim = hidden_dim
        self.input_dim = spec.joint_obs_dim
        self.params = ParamStore()
        init_lstm(self.params, "trunk", self.input_dim, hidden_dim, rng)
        for i, d in enumerate(spec.obs_dims):
            init_linear(self.params, f"head{i}.mean", hidden_dim, d, rng)
            init_linear(self.params, f"head{i}.logvar", hidden_dim, d, rng)

    def initial_state(self, batch: int = 1) -> Tuple[np.ndarray, np.ndarray]:
        zeros = np.zeros((batch, self.hidden_dim))
        return zeros, zeros.copy()


@dataclass
class ModelOutput:
    """One recurrent step: per-agent Gaussian parameters and the new state."""
    means: List[Tensor]
    logvars: List[Tensor]
    state: Tuple[Tensor, Tensor]

    def mean_delta(self) -> np.ndarray:
        """Concatenated mean delta, shape (b, D)."""
        return np.concatenate([m.data for m in self.means], axis=-1)


def model_forward(model: PredictiveModel, o_joint: ArrayLike, state: State) -> ModelOutput:
    """
    One recurrent step over a batch of joint observations.

    @param model - Predictor
    @param o_joint - (b, D) or (D,) joint observation
    @param state - (h, c), each (b, H)
    @return Means and clamped log-variances per agent, plus the new state
    """
    x = as_tensor(o_joint)
    if x.ndim == 1:
        x = ops.reshape(x, (1, x.shape[0]))
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise DimensionError("model_forward", f"(b, {model.input_dim})", x.shape)
    h, c = lstm_cell(x, state[0], state[1], model.params.scope("trunk"))
    means, logvars = [], []
    for i in range(model.spec.n_agents):
        mean_head = model.params.scope(f"head{i}.mean")
        logvar_head = model.params.scope(f"head{i}.logvar")
        means.append(linear(h, mean_head["w"], mean_head["b"]))
        logvars.append(ops.clamp(linear(h, logvar_head["w"], logvar_head["b"]), LOGVAR_MIN, LOGVAR_MAX))
    return ModelOutput(means=means, logvars=logvars, state=(h, c))


@dataclass
class ModelLoss:
    """
    @param loss - Mean NLL per (episode, step), the training objective
    @param total - Summed NLL over the batch
    @param per_agent - Summed NLL of each agent's head
    @param n_steps - Number of unpadded (episode, step) pairs
    """
    loss: Tensor
    total: float
    per_agent: List[float]
    n_steps: int


def stack_episodes(
    episodes: Sequence[Tuple[np.ndarray, np.ndarray]]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Pad episodes to a time-major batch.

    @param episodes - (observations (T, D), deltas (T, D)) pairs
    @return observations (T_max, B, D), deltas (T_max, B, D), weights (T_max, B)
    """
    if not episodes:
        raise InsufficientDataError("model_loss needs at least one episode")
    for obs, delta in episodes:
        if obs.shape != delta.shape or obs.shape[0] < 1:
            raise DimensionError("model_loss.episode", obs.shape, delta.shape)
    t_max = max(obs.shape[0] for obs, _ in episodes)
    dim = episodes[0][0].shape[1]
    b = len(episodes)
    observations = np.zeros((t_max, b, dim))
    deltas = np.zeros((t_max, b, dim))
    weights = np.zeros((t_max, b))
    for k, (obs, delta) in enumerate(episodes):
        if obs.shape[1] != dim:
            raise DimensionError("model_loss.episode", (obs.shape[0], dim), obs.shape)
        n = obs.shape[0]
        observations[:n, k] = obs
        deltas[:n, k] = delta
        weights[:n, k] = 1.0
    return observations, deltas, weights


def model_loss(model: PredictiveModel, episodes: Sequence[Tuple[np.ndarray, np.ndarray]]) -> ModelLoss:
    """
    Negative log-likelihood of the delta targets over whole episodes.

    The recurrent state starts at zero for every episode. The total is the
    sum of the per-agent head terms.

    @param model - Predictor
    @param episodes - (observations (T, D), deltas (T, D)) pairs
    @return Loss record
    """
    observations, deltas, weights = stack_episodes(episodes)
    t_max, b, _ = observations.shape
    state = model.initial_state(b)
    slices = model.spec.obs_slices()
    per_agent: List[Optional[Tensor]] = [None] * model.spec.n_agents
    for t in range(t_max):
        out = model_forward(model, observations[t], state)
        state = out.state
        w = weights[t][:, None]
        for i, sl in enumerate(slices):
            term = gaussian_nll(out.means[i], out.logvars[i], deltas[t][:, sl], weights=w)
            per_agent[i] = term if per_agent[i] is None else per_agent[i] + term
    total = per_agent[0]
    for term in per_agent[1:]:
        total = total + term
    n_steps = int(weights.sum())
    return ModelLoss(
        loss=total * (1.0 / n_steps),
        total=total.item(),
        per_agent=[term.item() for term in per_agent],
        n_steps=n_steps,
    )
