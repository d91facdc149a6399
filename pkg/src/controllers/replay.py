"""
Whole-episode replay for recurrent Q-learning.
"""
from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional, Sequence

import numpy as np

from src.utils.errors import DimensionError, InsufficientDataError


@dataclass
class EpisodeRecord:
    """
    One collected episode of T steps.

    @param inputs - Per agent, (T + 1, d_i) controller inputs; the last row follows the final step
    @param actions - (T, n) chosen actions
    @param rewards - (T,) shared rewards as used for learning
    @param dones - (T,) termination flags
    @param states - (T + 1, S) true joint observations, the QMIX global state
    @param masks - Optional (T + 1, n, n) communication masks in force
    """
    inputs: List[np.ndarray]
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    states: np.ndarray
    masks: Optional[np.ndarray] = None

    def __post_init__(self):
        T = self.actions.shape[0]
        if self.rewards.shape != (T,) or self.dones.shape != (T,):
            raise DimensionError("EpisodeRecord", (T,), (self.rewards.shape, self.dones.shape))
        if self.states.shape[0] != T + 1 or any(x.shape[0] != T + 1 for x in self.inputs):
            raise DimensionError("EpisodeRecord.inputs", T + 1, [x.shape[0] for x in self.inputs])

    def __len__(self) -> int:
        return self.actions.shape[0]


@dataclass
class EpisodeBatch:
    """
    Time-major, zero-padded batch.

    @param inputs - Per agent, (T + 1, B, d_i)
    @param actions - (T, B, n)
    @param rewards - (T, B)
    @param dones - (T, B)
    @param filled - (T, B), 1 for real steps and 0 for padding
    @param states - (T + 1, B, S)
    """
    inputs: List[np.ndarray]
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    filled: np.ndarray
    states: np.ndarray

    @property
    def max_t(self) -> int:
        return self.actions.shape[0]

    @property
    def size(self) -> int:
        return self.actions.shape[1]


def pad_batch(episodes: Sequence[EpisodeRecord]) -> EpisodeBatch:
    """Stack episodes into a padded time-major batch."""
    if not episodes:
        raise InsufficientDataError("Cannot build a batch from zero episodes")
    T = max(len(e) for e in episodes)
    B = len(episodes)
    n = episodes[0].actions.shape[1]
    inputs = [np.zeros((T + 1, B, x.shape[1])) for x in episodes[0].inputs]
    actions = np.zeros((T, B, n), dtype=np.int64)
    rewards = np.zeros((T, B))
    dones = np.zeros((T, B))
    filled = np.zeros((T, B))
    states = np.zeros((T + 1, B, episodes[0].states.shape[1]))
    for b, e in enumerate(episodes):
        t = len(e)
        for i, x in enumerate(e.inputs):
            inputs[i][: t + 1, b] = x
        actions[:t, b] = e.actions
        rewards[:t, b] = e.rewards
        dones[:t, b] = e.dones
        filled[:t, b] = 1.0
        states[: t + 1, b] = e.states
    return EpisodeBatch(inputs, actions, rewards, dones, filled, states)


class EpisodeReplay:
    """
    FIFO ring of whole episodes.

    @param capacity - Maximum number of stored episodes
    """
    def __init__(self, capacity: int = 5000):
        self.capacity = capacity
        self._episodes: Deque[EpisodeRecord] = deque(maxlen=capacity)

    def add(self, episode: EpisodeRecord) -> None:
        self._episodes.append(episode)

    def __len__(self) -> int:
        return len(self._episodes)

    def can_sample(self, batch_size: int) -> bool:
        return len(self._episodes) >= batch_size

    def sample(self, batch_size: int, rng: np.random.Generator) -> EpisodeBatch:
        if not self.can_sample(batch_size):
            raise InsufficientDataError(
                f"Replay holds {len(self._episodes)} episodes, need {batch_size}",
                {"have": len(self._episodes), "need": batch_size},
            )
        picks = rng.choice(len(self._episodes), size=batch_size, replace=False)
        return pad_batch([self._episodes[int(k)] for k in picks])
