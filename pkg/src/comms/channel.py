"""
Per-step sharing masks and the per-agent view of the joint observation.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.comms.schemes import CommScheme, maybe_resample, off_diagonal_mean, sample_matrix
from src.utils.errors import ScenarioError


def draw_mask(C: np.ndarray, t: int, rng: np.random.Generator) -> np.ndarray:
    """
    Realize one step of communication.

    At t = 0 every link is up. Afterwards entry (i, j) is an independent
    Bernoulli(C[i, j]) draw for i != j; the diagonal is always true.

    @param C - Communication matrix
    @param t - Step index
    @param rng - Communication random stream
    @return Boolean n×n mask, (i, j) true iff agent i receives agent j's observation
    """
    n = C.shape[0]
    if t == 0:
        return np.ones((n, n), dtype=bool)
    mask = rng.uniform(0.0, 1.0, size=(n, n)) < C
    np.fill_diagonal(mask, True)
    return mask


@dataclass(frozen=True)
class SharedView:
    """
    What agent `agent` holds at one step: each teammate's observation or None.
    """
    agent: int
    observations: List[Optional[np.ndarray]]
    present: np.ndarray

    @property
    def is_complete(self) -> bool:
        return bool(self.present.all())


def shared_view(joint_obs: Sequence[np.ndarray], mask: np.ndarray, agent: int) -> SharedView:
    """
    Build agent `agent`'s view of the joint observation under a mask.

    @param joint_obs - One observation per agent
    @param mask - Boolean n×n sharing mask
    @param agent - Receiving agent
    @return The view, with None for absent slots
    """
    n = len(joint_obs)
    if not 0 <= agent < n:
        raise ScenarioError(f"Agent index {agent} out of range for {n} agents", {"agent": agent, "n": n})
    row = np.array(mask[agent], dtype=bool)
    observations = [
        np.array(joint_obs[j], dtype=float) if row[j] else None
        for j in range(n)
    ]
    return SharedView(agent=agent, observations=observations, present=row)


class CommChannel:
    """
    Communication process of one episode: matrix sampling, dynamic resampling
    and per-step mask draws from a dedicated random stream.

    @param scheme - How matrices are drawn
    @param n_agents - Number of agents
    @param rng - Communication random stream
    """
    def __init__(self, scheme: CommScheme, n_agents: int, rng: np.random.Generator):
        self.scheme = scheme
        self.n_agents = n_agents
        self.rng = rng
        self.matrix: Optional[np.ndarray] = None
        self.epochs = 0

    def reset(self) -> np.ndarray:
        """Draw the episode's first matrix."""
        self.matrix = sample_matrix(self.scheme, self.n_agents, self.rng)
        self.epochs = 1
        return self.matrix

    @property
    def p_drawn(self) -> Optional[float]:
        return None if self.matrix is None else off_diagonal_mean(self.matrix)

    def mask(self, t: int) -> np.ndarray:
        """
        Mask for step t, resampling the matrix first when the scheme asks for it.

        @param t - Step index, called in increasing order from 0
        """
        if self.matrix is None:
            self.reset()
        updated = maybe_resample(self.scheme, t, self.matrix, self.rng)
        if updated is not self.matrix:
            self.epochs += 1
            self.matrix = updated
        return draw_mask(self.matrix, t, self.rng)
