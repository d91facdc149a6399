"""
Greedy evaluation under hybrid execution: single settings, p sweeps and the final scheme set.

Rollout k of every evaluation uses the same environment and communication
streams whatever the setting, so settings are compared on common random
numbers and sweep_p at p = 1 reproduces evaluate at fixed:1 exactly.
"""
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src.comms.channel import CommChannel
from src.comms.schemes import CommScheme
from src.envs.registry import make_env
from src.envs.trajectory import TrajectoryRecorder
from src.harness.persistence import LoadedRun
from src.harness.runner import EpisodeRunner
from src.harness.seeding import RunStreams
from src.harness.stats import summarize
from src.models.domain import EvalReport, StrategyId
from src.utils.errors import ConfigError
from src.utils.logger import logger

DEFAULT_P_GRID = [round(0.1 * k, 1) for k in range(11)]
ORACLE_SCHEME = CommScheme.fixed(1.0)


def _as_scheme(scheme: Union[str, CommScheme]) -> CommScheme:
    return scheme if isinstance(scheme, CommScheme) else CommScheme.parse(scheme)


def _enforce_oracle(run: LoadedRun, scheme: CommScheme) -> CommScheme:
    if run.strategy != StrategyId.ORACLE or str(scheme) == str(ORACLE_SCHEME):
        return scheme
    logger.logger.warning(f"Oracle runs are evaluated at {ORACLE_SCHEME} only; ignoring {scheme}")
    return ORACLE_SCHEME


def evaluate(
    run: LoadedRun,
    scheme: Union[str, CommScheme],
    n: int = 100,
    seed: Optional[int] = None,
    resamples: Optional[int] = None,
    bootstrap_rng: Optional[np.random.Generator] = None,
    recorder: Optional[TrajectoryRecorder] = None,
) -> EvalReport:
    """
    Mean return and bootstrap CI of n greedy rollouts.

    Controllers act with ε = 0 and no learned parameter is written.

    @param run - Loaded or in-training run
    @param scheme - Communication setting, e.g. "fixed:0.5", "default", "dynamic:5"
    @param n - Number of rollouts
    @param seed - Evaluation seed; defaults to the run seed
    @param resamples - Bootstrap resamples; defaults to the run's configuration
    @param bootstrap_rng - Overrides the bootstrap stream
    @param recorder - Optional trajectory dump of every rollout
    @return The report; its setting is the scheme actually used
    """
    if n < 1:
        raise ConfigError("At least one evaluation rollout is required", {"n": n})
    scheme = _enforce_oracle(run, _as_scheme(scheme))
    streams = RunStreams(run.seed if seed is None else seed)
    returns: List[float] = []
    for k in range(n):
        env = make_env(run.spec, streams.sequence("eval", k, 0), run.config.env.collision_penalty)
        runner = EpisodeRunner(env, run.learner, run.strategy, run.model)
        channel = CommChannel(scheme, run.spec.n_agents, streams.rng("eval", k, 1))
        returns.append(runner.rollout(channel, recorder=recorder, episode=k).episode_return)
    return summarize(
        str(scheme),
        returns,
        resamples=resamples or run.config.harness.bootstrap_resamples,
        rng=bootstrap_rng if bootstrap_rng is not None else streams.rng("bootstrap"),
    )


def sweep_p(
    run: LoadedRun,
    grid: Optional[Sequence[float]] = None,
    n: int = 100,
    seed: Optional[int] = None,
    resamples: Optional[int] = None,
) -> List[EvalReport]:
    """
    One evaluation per communication level p at fixed:p.

    @param run - Loaded run
    @param grid - Levels to evaluate; defaults to 0.0, 0.1, .., 1.0
    @param n - Rollouts per level
    @return Reports in grid order
    """
    grid = list(DEFAULT_P_GRID if grid is None else grid)
    if not grid:
        raise ConfigError("The p grid is empty")
    if run.strategy == StrategyId.ORACLE and grid != [1.0]:
        logger.logger.warning("Oracle runs are swept at p = 1 only")
        grid = [1.0]
    return [evaluate(run, CommScheme.fixed(p), n, seed=seed, resamples=resamples) for p in grid]


def sweep_levels(reports: Sequence[EvalReport]) -> List[float]:
    """Communication level of each sweep report."""
    return [CommScheme.parse(r.setting).p for r in reports]


def is_monotone(reports: Sequence[EvalReport]) -> bool:
    """True when mean return never decreases along the sweep."""
    means = [r.mean for r in reports]
    return all(b >= a for a, b in zip(means, means[1:]))


def final_evaluations(run: LoadedRun, n: Optional[int] = None) -> Dict[str, EvalReport]:
    """
    Evaluate a finished run under every configured final scheme.

    Oracle runs are evaluated at fixed:1 only.

    @param run - Finished run
    @param n - Rollouts per scheme; defaults to harness.final_rollouts
    @return Reports keyed by setting
    """
    n = n or run.config.harness.final_rollouts
    if run.strategy == StrategyId.ORACLE:
        schemes = [ORACLE_SCHEME]
    else:
        schemes = [CommScheme.parse(s) for s in run.config.harness.final_schemes]
    reports: Dict[str, EvalReport] = {}
    for scheme in schemes:
        reports[str(scheme)] = evaluate(run, scheme, n)
    return reports
