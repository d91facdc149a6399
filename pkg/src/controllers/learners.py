"""
IQL and QMIX training steps, target networks and the learner that owns them.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.controllers.mixer import QMixer, mix
from src.controllers.qnet import RecurrentQNet, q_forward
from src.controllers.replay import EpisodeBatch
from src.diffcore import ops
from src.diffcore.optim import AdamState, adam_step, clip_global_norm, global_norm
from src.diffcore.params import ParamStore
from src.diffcore.tensor import Tape, Tensor, backward
from src.models.domain import Algorithm
from src.utils.errors import DimensionError


@dataclass
class QOptimizer:
    """
    Adam over every learnable controller parameter (nets and mixer).

    @param params - Online parameters
    @param lr - Learning rate
    @param grad_clip - Optional global norm ceiling
    """
    params: ParamStore
    lr: float
    grad_clip: Optional[float] = None
    state: Optional[AdamState] = None
    last_grad_norm: float = 0.0

    def __post_init__(self):
        if self.state is None:
            self.state = AdamState.for_params(self.params)

    def apply(self, tape: Tape, loss: Tensor) -> None:
        grads = backward(tape, loss, self.params)
        self.last_grad_norm = global_norm(grads)
        if self.grad_clip is not None:
            grads = clip_global_norm(grads, self.grad_clip)
        adam_step(self.params, grads, self.state, self.lr)


def _check_batch(nets: Sequence[RecurrentQNet], batch: EpisodeBatch) -> None:
    if len(batch.inputs) != len(nets) or batch.actions.shape[2] != len(nets):
        raise DimensionError("batch.agents", len(nets), (len(batch.inputs), batch.actions.shape[2]))
    for net, x in zip(nets, batch.inputs):
        if x.shape[2] != net.input_dim:
            raise DimensionError(f"batch.inputs[{net.prefix}]", net.input_dim, x.shape[2])


def unroll(net: RecurrentQNet, inputs: np.ndarray) -> List[Tensor]:
    """Q-values at every step of a (T + 1, B, d) input sequence."""
    h = net.init_hidden(inputs.shape[1])
    qs = []
    for t in range(inputs.shape[0]):
        q, h = q_forward(net, inputs[t], h)
        qs.append(q)
    return qs


def _target_values(net: RecurrentQNet, inputs: np.ndarray) -> np.ndarray:
    """Target network Q-values (T + 1, B, A) without recording."""
    return np.stack([q.data for q in unroll(net, inputs)])


def td_targets(rewards: np.ndarray, dones: np.ndarray, next_values: np.ndarray, gamma: float) -> np.ndarray:
    """y_t = r_t + γ (1 - done_t) v_{t+1}."""
    return rewards + gamma * (1.0 - dones) * next_values


def _masked_mse(pred: Tensor, target: np.ndarray, filled: np.ndarray) -> Tensor:
    err = ops.square(pred - target) * filled
    return ops.sum(err) * (1.0 / max(float(filled.sum()), 1.0))


def iql_train(
    nets: Sequence[RecurrentQNet],
    targets: Sequence[RecurrentQNet],
    batch: EpisodeBatch,
    gamma: float,
    optimizer: QOptimizer,
) -> float:
    """
    One independent Q-learning step for every agent.

    Each agent regresses Q(input_t, a_t) on r_t + γ (1 - done) max_a Q_target(input_{t+1}, a);
    padded steps are masked out. The reported loss is the mean over agents.

    @return Loss before the update
    """
    _check_batch(nets, batch)
    T = batch.max_t
    ys = []
    for i, target in enumerate(targets):
        values = _target_values(target, batch.inputs[i])
        ys.append(td_targets(batch.rewards, batch.dones, values[1:].max(axis=-1), gamma))

    with Tape() as tape:
        per_agent = []
        for i, net in enumerate(nets):
            qs = unroll(net, batch.inputs[i])
            chosen = ops.stack([ops.gather(qs[t], batch.actions[t, :, i]) for t in range(T)])
            per_agent.append(_masked_mse(chosen, ys[i][:T], batch.filled))
        loss = per_agent[0]
        for term in per_agent[1:]:
            loss = loss + term
        loss = loss * (1.0 / len(nets))
    optimizer.apply(tape, loss)
    return loss.item()


def qmix_train(
    nets: Sequence[RecurrentQNet],
    mixer: QMixer,
    targets: Sequence[RecurrentQNet],
    target_mixer: QMixer,
    batch: EpisodeBatch,
    gamma: float,
    optimizer: QOptimizer,
) -> float:
    """
    One QMIX step: a single TD loss on the mixed Q_tot.

    The target mixes the target networks' greedy per-agent values at the
    next global state.

    @return Loss before the update
    """
    _check_batch(nets, batch)
    T = batch.max_t
    next_q = np.stack(
        [_target_values(target, batch.inputs[i])[1:].max(axis=-1) for i, target in enumerate(targets)],
        axis=-1,
    )
    next_tot = np.stack([
        mix(target_mixer, next_q[t], batch.states[t + 1]).data for t in range(T)
    ])
    y = td_targets(batch.rewards, batch.dones, next_tot, gamma)

    with Tape() as tape:
        agent_qs = [unroll(net, batch.inputs[i]) for i, net in enumerate(nets)]
        q_tot = []
        for t in range(T):
            chosen = ops.stack(
                [ops.gather(agent_qs[i][t], batch.actions[t, :, i]) for i in range(len(nets))],
                axis=1,
            )
            q_tot.append(mix(mixer, chosen, batch.states[t]))
        loss = _masked_mse(ops.stack(q_tot), y, batch.filled)
    optimizer.apply(tape, loss)
    return loss.item()


def target_update(params: ParamStore, target_params: ParamStore, train_step_count: int, period: int = 200) -> bool:
    """
    Hard copy of the online parameters every `period` training steps.

    @return True when a copy happened
    """
    if train_step_count > 0 and train_step_count % period == 0:
        target_params.copy_from(params)
        return True
    return False


class QLearner:
    """
    Per-agent Q-networks, the optional mixer, their targets and the optimizer.

    @param input_dims - Controller input dimension per agent
    @param action_counts - Action count per agent
    @param algorithm - iql or qmix
    @param state_dim - QMIX global state dimension
    @param hidden_dim - GRU width
    @param lr - Adam learning rate
    @param gamma - Discount
    @param target_period - Training steps between hard target updates
    @param rng - Initialization stream
    """
    def __init__(
        self,
        input_dims: Sequence[int],
        action_counts: Sequence[int],
        algorithm: Algorithm,
        state_dim: int,
        hidden_dim: int = 256,
        lr: float = 5e-4,
        gamma: float = 0.99,
        target_period: int = 200,
        grad_clip: Optional[float] = None,
        embed_dim: int = 32,
        hypernet_dim: int = 64,
        rng: Optional[np.random.Generator] = None,
    ):
        self.algorithm = algorithm
        self.gamma = gamma
        self.target_period = target_period
        self.params = ParamStore()
        self.nets = [
            RecurrentQNet(self.params, f"agent{i}", d, a, hidden_dim, rng)
            for i, (d, a) in enumerate(zip(input_dims, action_counts))
        ]
        self.mixer: Optional[QMixer] = None
        if algorithm == Algorithm.QMIX:
            self.mixer = QMixer(self.params, len(self.nets), state_dim, embed_dim, hypernet_dim, rng)
        self.target_params = self.params.clone()
        self.target_nets = [net.bind(self.target_params) for net in self.nets]
        self.target_mixer = self.mixer.bind(self.target_params) if self.mixer else None
        self.optimizer = QOptimizer(self.params, lr, grad_clip)
        self.train_steps = 0

    def init_hidden(self) -> List[np.ndarray]:
        return [net.init_hidden(1) for net in self.nets]

    def q_values(self, agent: int, x: np.ndarray, h: np.ndarray):
        """Greedy-time forward for one agent; returns (q (A,), h')."""
        q, h_next = q_forward(self.nets[agent], x[None, :], h)
        return q.data[0], h_next.data

    def train(self, batch: EpisodeBatch) -> float:
        """One training step followed by the periodic target update."""
        if self.algorithm == Algorithm.QMIX:
            loss = qmix_train(
                self.nets, self.mixer, self.target_nets, self.target_mixer, batch, self.gamma, self.optimizer
            )
        else:
            loss = iql_train(self.nets, self.target_nets, batch, self.gamma, self.optimizer)
        self.train_steps += 1
        target_update(self.params, self.target_params, self.train_steps, self.target_period)
        return loss
