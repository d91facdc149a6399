"""
Epsilon-greedy action selection.
"""
from dataclasses import dataclass

import numpy as np

from src.utils.errors import ConfigError, DimensionError


@dataclass(frozen=True)
class EpsilonSchedule:
    """
    Linear anneal from start to end over `anneal` environment steps.
    """
    start: float = 1.0
    end: float = 0.05
    anneal: int = 500_000

    def value(self, env_steps: int) -> float:
        if env_steps >= self.anneal:
            return self.end
        frac = max(env_steps, 0) / self.anneal
        return self.start + (self.end - self.start) * frac


def select_action(q: np.ndarray, eps: float, rng: np.random.Generator) -> int:
    """
    Random action with probability eps, otherwise the greedy one.

    Ties go to the lowest index. At eps = 0 the stream is not consumed.

    @param q - Action values
    @param eps - Exploration rate in [0, 1]
    @param rng - Exploration stream
    """
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.size == 0:
        raise DimensionError("select_action", "non-empty q", q.shape)
    if not 0.0 <= eps <= 1.0:
        raise ConfigError("eps must lie in [0, 1]", {"eps": eps})
    if eps > 0.0 and rng.random() < eps:
        return int(rng.integers(q.size))
    return int(np.argmax(q))
