"""
Episode storage for predictive model training.
"""
from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Sequence

import numpy as np

from src.utils.errors import DimensionError, InsufficientDataError


@dataclass(frozen=True)
class ModelEpisode:
    """
    Pairs (o_t, Δ_t) of one episode with Δ_t = o_{t+1} - o_t.

    @param observations - (T, D) joint observations o_0 .. o_{T-1}
    @param deltas - (T, D) deltas
    """
    observations: np.ndarray
    deltas: np.ndarray

    @classmethod
    def from_stream(cls, joint_stream: Sequence[Sequence[np.ndarray]]) -> "ModelEpisode":
        """
        Build from the joint observations o_0 .. o_T of an episode.

        @param joint_stream - T + 1 joint observations, each a list of per-agent vectors
        """
        if len(joint_stream) < 2:
            raise DimensionError("ModelEpisode", "at least 2 joint observations", len(joint_stream))
        flat = np.stack([np.concatenate([np.asarray(o, dtype=float) for o in joint]) for joint in joint_stream])
        return cls(observations=flat[:-1].copy(), deltas=flat[1:] - flat[:-1])

    def __len__(self) -> int:
        return self.observations.shape[0]

    def as_pair(self):
        return self.observations, self.deltas


class ModelBuffer:
    """
    FIFO ring of whole episodes.

    @param capacity - Maximum number of stored episodes
    """
    def __init__(self, capacity: int = 5000):
        self.capacity = capacity
        self._episodes: Deque[ModelEpisode] = deque(maxlen=capacity)

    def add(self, episode: ModelEpisode) -> None:
        self._episodes.append(episode)

    def __len__(self) -> int:
        return len(self._episodes)

    def episodes(self) -> List[ModelEpisode]:
        return list(self._episodes)

    def sample(self, batch_size: int, rng: np.random.Generator) -> List[ModelEpisode]:
        """
        Draw distinct episodes uniformly.

        @param batch_size - Number of episodes
        @param rng - Sampling stream
        """
        if len(self._episodes) < batch_size:
            raise InsufficientDataError(
                f"Buffer holds {len(self._episodes)} episodes, need {batch_size}",
                {"have": len(self._episodes), "need": batch_size},
            )
        picks = rng.choice(len(self._episodes), size=batch_size, replace=False)
        return [self._episodes[int(k)] for k in picks]
