"""
Run directories: building the learned components of a run, saving them and loading them back.

A run directory holds
    config.json       resolved experiment configuration
    run.json          scenario spec, strategy, seed, reward statistics, counters
    controllers.ckpt  every Q-network and the mixer
    model.ckpt        predictive model (maro strategies only)
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from pydantic import ValidationError

from src.controllers.learners import QLearner
from src.controllers.reward import RewardStandardizer
from src.diffcore.checkpoint import load_params, save_params
from src.envs.registry import scenario_spec
from src.models.config import ExperimentConfig, build_config
from src.models.domain import ScenarioId, ScenarioSpec, StrategyId
from src.strategies.inputs import input_dim
from src.utils.errors import CheckpointError, ConfigError, DimensionError
from src.utils.io import read_json, write_json
from src.utils.logger import logger
from src.worldmodel.model import PredictiveModel

CONFIG_FILE = "config.json"
RUN_FILE = "run.json"
CONTROLLERS_FILE = "controllers.ckpt"
MODEL_FILE = "model.ckpt"


@dataclass
class LoadedRun:
    """
    Everything needed to act with a trained (or training) run.

    @param config - Resolved configuration, restricted to this run's seed
    @param seed - Master seed
    @param spec - Scenario the controllers were built for
    @param learner - Controllers
    @param model - Predictive model, for maro strategies
    @param standardizer - Reward statistics at save time
    @param counters - env_steps, episodes, train_steps, model_steps
    @param run_dir - Source or target directory
    """
    config: ExperimentConfig
    seed: int
    spec: ScenarioSpec
    learner: QLearner
    model: Optional[PredictiveModel] = None
    standardizer: RewardStandardizer = field(default_factory=RewardStandardizer)
    counters: Dict[str, int] = field(default_factory=dict)
    run_dir: Optional[Path] = None

    @property
    def strategy(self) -> StrategyId:
        return self.config.strategy


def build_learner(config: ExperimentConfig, spec: ScenarioSpec, rng: Optional[np.random.Generator]) -> QLearner:
    """Controllers sized for the scenario and strategy; rng None gives zero weights."""
    ctl = config.controllers
    return QLearner(
        input_dims=[input_dim(config.strategy, spec, i) for i in range(spec.n_agents)],
        action_counts=spec.action_counts,
        algorithm=config.algorithm,
        state_dim=spec.joint_obs_dim,
        hidden_dim=ctl.hidden_dim,
        lr=ctl.learning_rate,
        gamma=ctl.gamma,
        target_period=ctl.target_update,
        grad_clip=ctl.grad_clip,
        embed_dim=ctl.mixer_embed_dim,
        hypernet_dim=ctl.mixer_hypernet_dim,
        rng=rng,
    )


def build_model(
    config: ExperimentConfig, spec: ScenarioSpec, rng: Optional[np.random.Generator]
) -> Optional[PredictiveModel]:
    """Predictive model for maro strategies, None otherwise."""
    if not config.strategy.uses_model:
        return None
    return PredictiveModel(spec, hidden_dim=config.worldmodel.hidden_dim, rng=rng)


def save_run(run: LoadedRun, run_dir: Union[str, Path]) -> Path:
    """
    Write the run's configuration, state and checkpoints.

    @param run - Run to save
    @param run_dir - Target directory
    @return The directory
    """
    run_dir = Path(run_dir)
    write_json(run_dir / CONFIG_FILE, run.config.model_dump(mode="json"))
    write_json(run_dir / RUN_FILE, {
        "seed": run.seed,
        "scenario_spec": run.spec.model_dump(mode="json"),
        "strategy": run.strategy.value,
        "algorithm": run.config.algorithm.value,
        "reward_stats": run.standardizer.to_dict(),
        "counters": dict(sorted(run.counters.items())),
    })
    save_params(run_dir / CONTROLLERS_FILE, run.learner.params)
    if run.model is not None:
        save_params(run_dir / MODEL_FILE, run.model.params)
    return run_dir


def load_run(
    run_dir: Union[str, Path],
    scenario: Optional[Union[str, ScenarioId]] = None,
) -> LoadedRun:
    """
    Rebuild a run from its directory.

    @param run_dir - Directory written by save_run
    @param scenario - Scenario the caller expects; a different one is a mismatch
    @return The loaded run
    """
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise CheckpointError(f"Run directory not found: {run_dir}", {"path": str(run_dir)})
    try:
        config = build_config(read_json(run_dir / CONFIG_FILE))
    except ConfigError as e:
        raise CheckpointError(f"Stored configuration is invalid: {e.message}", e.details) from e
    state: Dict[str, Any] = read_json(run_dir / RUN_FILE)
    try:
        stored = ScenarioSpec.model_validate(state["scenario_spec"])
    except (KeyError, ValidationError) as e:
        raise CheckpointError(f"Malformed {RUN_FILE}: {e}", {"path": str(run_dir / RUN_FILE)}) from e
    spec = scenario_spec(config.scenario, config.env.max_steps)
    if stored != spec or stored.scenario_id != config.scenario:
        raise CheckpointError(
            "Checkpoint scenario does not match its configuration",
            {"stored": stored.scenario_id.value, "configured": config.scenario.value},
        )
    if scenario is not None:
        requested = scenario_spec(scenario).scenario_id
        if requested != spec.scenario_id:
            raise CheckpointError(
                f"Checkpoint was trained on {spec.scenario_id.value}, not {requested.value}",
                {"stored": spec.scenario_id.value, "requested": requested.value},
            )

    learner = build_learner(config, spec, rng=None)
    model = build_model(config, spec, rng=None)
    try:
        load_params(run_dir / CONTROLLERS_FILE, learner.params)
        learner.target_params.copy_from(learner.params)
        if model is not None:
            load_params(run_dir / MODEL_FILE, model.params)
    except DimensionError as e:
        raise CheckpointError("Checkpoint layout does not match the scenario", e.details) from e

    counters = {k: int(v) for k, v in state.get("counters", {}).items()}
    learner.train_steps = counters.get("train_steps", 0)
    logger.logger.debug(f"Loaded run {run_dir.name} ({spec.scenario_id.value}, {config.strategy.value})")
    return LoadedRun(
        config=config,
        seed=int(state["seed"]),
        spec=spec,
        learner=learner,
        model=model,
        standardizer=RewardStandardizer.from_dict(state["reward_stats"]),
        counters=counters,
        run_dir=run_dir,
    )
