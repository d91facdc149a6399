"""
Gradient clipping and the Adam optimizer.
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from src.diffcore.params import ParamStore
from src.utils.errors import ConfigError, DimensionError

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


def global_norm(grads: Mapping[str, np.ndarray]) -> float:
    """L2 norm over all gradient entries."""
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))


def clip_global_norm(grads: Mapping[str, np.ndarray], max_norm: float) -> Dict[str, np.ndarray]:
    """
    Rescale gradients so their global L2 norm does not exceed max_norm.

    @param grads - Gradients by parameter name
    @param max_norm - Norm ceiling, > 0
    @return New gradient dict; unchanged values when already within the ceiling
    """
    if max_norm <= 0:
        raise ConfigError("max_norm must be positive", {"max_norm": max_norm})
    norm = global_norm(grads)
    if norm <= max_norm:
        return {name: g.copy() for name, g in grads.items()}
    scale = max_norm / norm
    return {name: g * scale for name, g in grads.items()}


@dataclass
class AdamState:
    """
    First and second moments per parameter plus the step counter.
    """
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def for_params(cls, params: ParamStore) -> "AdamState":
        return cls(
            m={name: np.zeros_like(t.data) for name, t in params.items()},
            v={name: np.zeros_like(t.data) for name, t in params.items()},
        )


def adam_step(
    params: ParamStore,
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> AdamState:
    """
    Apply one bias-corrected Adam update in place.

    @param params - Parameters to update
    @param grads - Gradients keyed like params
    @param state - Moments and step counter, updated in place
    @param lr - Learning rate
    @return The updated state
    """
    state.step += 1
    correction1 = 1.0 - BETA1 ** state.step
    correction2 = 1.0 - BETA2 ** state.step
    for name, tensor in params.items():
        g = grads[name]
        if g.shape != tensor.shape:
            raise DimensionError(f"adam_step:{name}", tensor.shape, g.shape)
        m = state.m.setdefault(name, np.zeros_like(tensor.data))
        v = state.v.setdefault(name, np.zeros_like(tensor.data))
        m *= BETA1
        m += (1.0 - BETA1) * g
        v *= BETA2
        v += (1.0 - BETA2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        tensor.data -= lr * m_hat / (np.sqrt(v_hat) + EPSILON)
    return state
