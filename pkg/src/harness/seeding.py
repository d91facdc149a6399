"""
Named, independent random streams derived from a run's master seed.
"""
from typing import Tuple

import numpy as np

from src.envs.base import make_rng
from src.utils.errors import ConfigError

STREAMS: Tuple[str, ...] = (
    "env",
    "explore",
    "comm",
    "bootstrap",
    "init",
    "model",
    "replay",
    "md",
    "eval",
)


class RunStreams:
    """
    Splits one master seed into named sub-streams.

    Each stream is a Philox generator keyed by (seed, stream index, *keys),
    so consuming one stream never shifts another.

    @param seed - Master seed of the run
    """
    def __init__(self, seed: int):
        if seed < 0:
            raise ConfigError("Seeds must be non-negative", {"seed": seed})
        self.seed = seed

    def sequence(self, name: str, *keys: int) -> np.random.SeedSequence:
        if name not in STREAMS:
            raise ConfigError(f"Unknown random stream '{name}'", {"stream": name, "known": list(STREAMS)})
        return np.random.SeedSequence(self.seed, spawn_key=(STREAMS.index(name), *keys))

    def rng(self, name: str, *keys: int) -> np.random.Generator:
        """Fresh generator for a stream; equal arguments give equal draws."""
        return make_rng(self.sequence(name, *keys))
