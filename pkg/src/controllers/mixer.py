"""
Monotonic mixing of per-agent Q-values into Q_tot.

Hypernetworks map the global state to the mixing weights; the absolute
value keeps every weight non-negative, so dQ_tot/dq_i >= 0.
"""
from typing import Optional

import numpy as np

from src.diffcore import ops
from src.diffcore.nn import linear
from src.diffcore.params import ParamStore, init_linear
from src.diffcore.tensor import ArrayLike, Tensor, as_tensor
from src.utils.errors import DimensionError


class QMixer:
    """
    Two-layer monotonic mixer with ELU between the layers.

    @param params - Store receiving the parameters
    @param n_agents - Number of Q-values mixed
    @param state_dim - Global state dimension
    @param embed_dim - Mixing layer width
    @param hypernet_dim - Hidden width of the weight hypernetworks
    @param rng - Initialization stream; None gives zeros
    """
    def __init__(
        self,
        params: ParamStore,
        n_agents: int,
        state_dim: int,
        embed_dim: int = 32,
        hypernet_dim: int = 64,
        rng: Optional[np.random.Generator] = None,
        prefix: str = "mixer",
        register: bool = True,
    ):
        self.params = params
        self.n_agents = n_agents
        self.state_dim = state_dim
        self.embed_dim = embed_dim
        self.hypernet_dim = hypernet_dim
        self.prefix = prefix
        if register:
            p = prefix
            init_linear(params, f"{p}.w1_in", state_dim, hypernet_dim, rng)
            init_linear(params, f"{p}.w1_out", hypernet_dim, n_agents * embed_dim, rng)
            init_linear(params, f"{p}.b1", state_dim, embed_dim, rng)
            init_linear(params, f"{p}.w2_in", state_dim, hypernet_dim, rng)
            init_linear(params, f"{p}.w2_out", hypernet_dim, embed_dim, rng)
            init_linear(params, f"{p}.v_in", state_dim, embed_dim, rng)
            init_linear(params, f"{p}.v_out", embed_dim, 1, rng)

    def bind(self, params: ParamStore) -> "QMixer":
        return QMixer(
            params, self.n_agents, self.state_dim, self.embed_dim, self.hypernet_dim,
            prefix=self.prefix, register=False,
        )

    @classmethod
    def identity(cls, params: ParamStore, state_dim: int, offset: float = 100.0, embed_dim: int = 32) -> "QMixer":
        """
        Single-agent mixer with Q_tot = q for q > -offset.

        Every hypernetwork weight is zero; the output biases route q through
        the first embedding unit, shifted into the linear part of the ELU.
        """
        mixer = cls(params, 1, state_dim, embed_dim=embed_dim, rng=None)
        p = mixer.prefix
        params[f"{p}.w1_out.b"].data[0] = 1.0
        params[f"{p}.b1.b"].data[0] = offset
        params[f"{p}.w2_out.b"].data[0] = 1.0
        params[f"{p}.v_out.b"].data[0] = -offset
        return mixer

    def _layer(self, name: str, x: Tensor) -> Tensor:
        scope = self.params.scope(f"{self.prefix}.{name}")
        return linear(x, scope["w"], scope["b"])

    def weights(self, states: ArrayLike):
        """
        Mixing weights and biases for a batch of states.

        @return (W1 (b, n, E), b1 (b, E), W2 (b, E), V (b,))
        """
        s = as_tensor(states)
        if s.ndim != 2 or s.shape[1] != self.state_dim:
            raise DimensionError("QMixer.state", f"(b, {self.state_dim})", s.shape)
        b = s.shape[0]
        w1 = ops.absolute(self._layer("w1_out", ops.relu(self._layer("w1_in", s))))
        w1 = ops.reshape(w1, (b, self.n_agents, self.embed_dim))
        b1 = self._layer("b1", s)
        w2 = ops.absolute(self._layer("w2_out", ops.relu(self._layer("w2_in", s))))
        v = ops.reshape(self._layer("v_out", ops.relu(self._layer("v_in", s))), (b,))
        return w1, b1, w2, v


def mix(mixer: QMixer, qs: ArrayLike, states: ArrayLike) -> Tensor:
    """
    Q_tot = ELU(q W1 + b1) · W2 + V(s).

    @param mixer - Mixer
    @param qs - Chosen per-agent Q-values (b, n)
    @param states - Global states (b, state_dim)
    @return Q_tot (b,)
    """
    qs = as_tensor(qs)
    if qs.ndim != 2 or qs.shape[1] != mixer.n_agents:
        raise DimensionError("mix.qs", f"(b, {mixer.n_agents})", qs.shape)
    w1, b1, w2, v = mixer.weights(states)
    b = qs.shape[0]
    hidden = ops.elu(ops.sum(ops.reshape(qs, (b, mixer.n_agents, 1)) * w1, axis=1) + b1)
    return ops.sum(hidden * w2, axis=1) + v
