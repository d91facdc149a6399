"""
Recurrent per-agent Q-network: one GRU step followed by a linear head.
"""
from typing import Optional, Tuple

import numpy as np

from src.diffcore import ops
from src.diffcore.nn import gru_cell, linear
from src.diffcore.params import ParamStore, init_gru, init_linear
from src.diffcore.tensor import ArrayLike, Tensor, as_tensor
from src.utils.errors import DimensionError


class RecurrentQNet:
    """
    Q-network of one agent, stored under `prefix` in a shared ParamStore.

    @param params - Store receiving the parameters
    @param prefix - Name prefix, e.g. "agent0"
    @param input_dim - Controller input dimension
    @param n_actions - Number of discrete actions
    @param hidden_dim - GRU width
    @param rng - Initialization stream; None gives an all-zero net
    """
    def __init__(
        self,
        params: ParamStore,
        prefix: str,
        input_dim: int,
        n_actions: int,
        hidden_dim: int = 256,
        rng: Optional[np.random.Generator] = None,
        register: bool = True,
    ):
        self.params = params
        self.prefix = prefix
        self.input_dim = input_dim
        self.n_actions = n_actions
        self.hidden_dim = hidden_dim
        if register:
            init_gru(params, f"{prefix}.gru", input_dim, hidden_dim, rng)
            init_linear(params, f"{prefix}.head", hidden_dim, n_actions, rng)

    def bind(self, params: ParamStore) -> "RecurrentQNet":
        """The same network reading its weights from another store with the same layout."""
        return RecurrentQNet(
            params, self.prefix, self.input_dim, self.n_actions, self.hidden_dim, register=False
        )

    def init_hidden(self, batch: int = 1) -> np.ndarray:
        return np.zeros((batch, self.hidden_dim))


def q_forward(net: RecurrentQNet, x: ArrayLike, h: ArrayLike) -> Tuple[Tensor, Tensor]:
    """
    One recurrent step.

    @param net - Q-network
    @param x - Input (b, input_dim)
    @param h - Hidden state (b, hidden_dim)
    @return (q-values (b, n_actions), new hidden state)
    """
    x = as_tensor(x)
    if x.ndim == 1:
        x = ops.reshape(x, (1, x.shape[0]))
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise DimensionError("q_forward", f"(b, {net.input_dim})", x.shape)
    h_next = gru_cell(x, h, net.params.scope(f"{net.prefix}.gru"))
    head = net.params.scope(f"{net.prefix}.head")
    return linear(h_next, head["w"], head["b"]), h_next
