"""
Running reward standardisation.
"""
import math
from typing import Dict

VAR_EPS = 1e-6


class RewardStandardizer:
    """
    Welford running mean and variance of raw rewards.
    """
    def __init__(self, count: int = 0, mean: float = 0.0, m2: float = 0.0):
        self.count = count
        self.mean = mean
        self.m2 = m2

    @property
    def var(self) -> float:
        return self.m2 / self.count if self.count else 0.0

    def update(self, r: float) -> None:
        self.count += 1
        delta = r - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (r - self.mean)

    def standardize(self, r: float, update: bool = True) -> float:
        """
        Standardize one reward, folding it into the statistics first.

        The first reward maps to 0.

        @param r - Raw reward
        @param update - False leaves the statistics frozen
        """
        if update:
            self.update(r)
        if self.count < 2:
            return 0.0
        return (r - self.mean) / math.sqrt(self.var + VAR_EPS)

    def to_dict(self) -> Dict[str, float]:
        return {"count": self.count, "mean": self.mean, "m2": self.m2}

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> "RewardStandardizer":
        return cls(count=int(data["count"]), mean=float(data["mean"]), m2=float(data["m2"]))


def standardize_reward(r: float, stats: RewardStandardizer, update: bool = True) -> float:
    """Functional form of RewardStandardizer.standardize."""
    return stats.standardize(r, update=update)
