"""
Per-episode trajectory dump as JSON lines {t, agent, pos, vel, reward}.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Union

from src.envs.base import Env
from src.utils.io import write_text


class TrajectoryRecorder:
    """
    Collects one record per agent per step of an episode.
    """
    def __init__(self):
        self.records: List[Dict[str, Any]] = []

    def record(self, t: int, env: Env, reward: float, episode: int = 0) -> None:
        """
        Snapshot the environment after step t.

        @param t - Step index (0 is the reset state)
        @param env - Environment to snapshot
        @param reward - Team reward received on this step
        @param episode - Episode index within the dump
        """
        for agent, state in enumerate(env.snapshot()):
            self.records.append({
                "episode": episode,
                "t": t,
                "agent": agent,
                "pos": state["pos"],
                "vel": state["vel"],
                "reward": reward,
            })

    def dumps(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    def write(self, path: Union[str, Path]) -> Path:
        return write_text(path, self.dumps())
