"""
Percentile bootstrap of the mean.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from src.models.domain import EvalReport
from src.utils.errors import ConfigError, InsufficientDataError


def bootstrap_ci(
    samples: Sequence[float],
    resamples: int = 10_000,
    level: float = 0.95,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[float, float]:
    """
    Confidence interval of the mean by resampling with replacement.

    @param samples - Observed values, at least one
    @param resamples - Number of bootstrap resamples
    @param level - Coverage, e.g. 0.95 for the 2.5th/97.5th percentiles
    @param rng - Bootstrap stream
    @return (lo, hi), always bracketing the sample mean
    """
    values = np.asarray(samples, dtype=float).reshape(-1)
    if values.size == 0:
        raise InsufficientDataError("bootstrap_ci needs at least one sample")
    if not 0.0 < level < 1.0:
        raise ConfigError("level must lie in (0, 1)", {"level": level})
    if resamples < 1:
        raise ConfigError("resamples must be positive", {"resamples": resamples})
    mean = float(values.mean())
    if values.size == 1 or np.all(values == values[0]):
        return mean, mean
    rng = rng if rng is not None else np.random.default_rng(0)
    idx = rng.integers(0, values.size, size=(resamples, values.size))
    means = values[idx].mean(axis=1)
    tail = 100.0 * (1.0 - level) / 2.0
    lo, hi = np.percentile(means, [tail, 100.0 - tail])
    return min(float(lo), mean), max(float(hi), mean)


def summarize(
    setting: str,
    returns: Sequence[float],
    resamples: int = 10_000,
    rng: Optional[np.random.Generator] = None,
) -> EvalReport:
    """EvalReport of a list of episodic returns."""
    returns = [float(r) for r in returns]
    lo, hi = bootstrap_ci(returns, resamples=resamples, rng=rng)
    return EvalReport(
        setting=setting,
        mean=float(np.mean(returns)),
        ci_lo=lo,
        ci_hi=hi,
        n=len(returns),
        returns=returns,
    )
