"""
The train/collect loop of one run and the multi-seed launcher.
"""
import multiprocessing as mp
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.comms.schemes import CommScheme
from src.controllers.exploration import EpsilonSchedule
from src.controllers.replay import EpisodeReplay
from src.controllers.reward import RewardStandardizer
from src.envs.registry import make_env, scenario_spec
from src.harness.evaluation import evaluate, final_evaluations
from src.harness.outputs import METRICS_FILE, write_final_eval, write_summary, write_training_curve
from src.harness.persistence import LoadedRun, build_learner, build_model, save_run
from src.harness.runner import EpisodeResult, EpisodeRunner
from src.harness.seeding import RunStreams
from src.models.config import ExperimentConfig, build_config
from src.models.domain import MetricPoint, RunMetrics
from src.strategies.inputs import TrainingDropout
from src.utils.errors import WorkbenchError
from src.utils.io import write_json
from src.utils.logger import logger
from src.worldmodel.buffer import ModelBuffer
from src.worldmodel.trainer import ModelTrainer, train_model_step


class TrainingRun:
    """
    State of one training run: environment, learners, replays and metrics.

    Every random decision draws from a named stream of the run seed, so a
    (config, seed) pair fully determines the run.

    @param config - Experiment configuration
    @param seed - Master seed of this run
    @param run_dir - Output directory; defaults to <output_dir>/<run name>
    """
    def __init__(self, config: ExperimentConfig, seed: int, run_dir: Optional[Union[str, Path]] = None):
        self.config = config.for_seed(seed)
        self.seed = seed
        self.run_id = config.run_name(seed)
        self.run_dir = Path(run_dir) if run_dir is not None else Path(config.output_dir) / self.run_id
        self.streams = RunStreams(seed)

        ctl, wm = self.config.controllers, self.config.worldmodel
        strategy = self.config.strategy
        spec = scenario_spec(self.config.scenario, self.config.env.max_steps)
        self.env = make_env(spec, self.streams.sequence("env"), self.config.env.collision_penalty)
        learner = build_learner(self.config, spec, self.streams.rng("init", 0))
        model = build_model(self.config, spec, self.streams.rng("init", 1))
        self.run = LoadedRun(self.config, seed, spec, learner, model, RewardStandardizer(), {}, self.run_dir)

        self.runner = EpisodeRunner(self.env, learner, strategy, model)
        self.replay = EpisodeReplay(ctl.buffer_size)
        self.model_buffer = ModelBuffer(wm.buffer_size) if model is not None else None
        self.model_trainer = (
            ModelTrainer(model, lr=wm.lr, grad_clip=wm.grad_clip, batch_size=wm.batch_size)
            if model is not None else None
        )
        self.schedule = EpsilonSchedule(ctl.epsilon_start, ctl.epsilon_end, ctl.epsilon_anneal)
        self.dropout = (
            TrainingDropout(CommScheme.parse(self.config.comms.train_scheme), spec.n_agents, self.streams.rng("md"))
            if strategy.drops_in_training else None
        )
        self.explore_rng = self.streams.rng("explore")
        self.replay_rng = self.streams.rng("replay")
        self.model_rng = self.streams.rng("model")

        self.metrics = RunMetrics()
        self.env_steps = 0
        self.episodes = 0
        self.td_loss: Optional[float] = None
        self.model_loss: Optional[float] = None

    @property
    def learner(self):
        return self.run.learner

    @property
    def model(self):
        return self.run.model

    def counters(self) -> Dict[str, int]:
        return {
            "env_steps": self.env_steps,
            "episodes": self.episodes,
            "train_steps": self.learner.train_steps,
            "model_steps": self.model_trainer.steps if self.model_trainer else 0,
        }

    def train_episode(self) -> EpisodeResult:
        """
        Collect one episode, store it and take one training step of each learner.

        The controllers train once the replay can fill a batch; the model
        trains alongside them once its own buffer is warm.
        """
        ctl = self.config.controllers
        epsilon = self.schedule.value(self.env_steps)
        standardizer = self.run.standardizer if ctl.reward_standardisation else None
        result = self.runner.collect(epsilon, self.explore_rng, self.dropout, standardizer)
        self.env_steps += result.steps
        self.episodes += 1
        self.replay.add(result.record)
        if self.model_buffer is not None:
            self.model_buffer.add(result.model_episode)
        logger.log_episode(self.episodes - 1, self.seed, result.p_drawn, result.episode_return)

        if self.replay.can_sample(ctl.batch_size):
            self.td_loss = self.learner.train(self.replay.sample(ctl.batch_size, self.replay_rng))
            if self.model_trainer is not None:
                step = train_model_step(self.model_trainer, self.model_buffer, self.model_rng)
                if not step.warming_up:
                    self.model_loss = step.loss
        return result

    def record_point(self) -> MetricPoint:
        """Evaluate the current controllers and append a training-curve point."""
        h = self.config.harness
        report = evaluate(self.run, self.config.comms.eval_scheme, h.eval_rollouts)
        point = MetricPoint(
            env_steps=self.env_steps,
            eval_return=report.mean,
            ci_lo=report.ci_lo,
            ci_hi=report.ci_hi,
            model_loss=self.model_loss,
            td_loss=self.td_loss,
            epsilon=self.schedule.value(self.env_steps),
        )
        self.metrics.append(point)
        logger.logger.info(
            f"{self.run_id} step {self.env_steps}: return {report.mean:.3f} "
            f"[{report.ci_lo:.3f}, {report.ci_hi:.3f}] eps {point.epsilon:.3f}"
        )
        return point

    def save(self) -> Path:
        self.run.counters = self.counters()
        save_run(self.run, self.run_dir)
        write_json(self.run_dir / METRICS_FILE, self.metrics.model_dump(mode="json"))
        return self.run_dir

    def train(self) -> Path:
        """
        Run the collect/train loop to the step budget, then save and run the final evaluations.

        @return The run directory
        """
        h = self.config.harness
        logger.log_run_event(self.run_id, "started", {
            "scenario": self.config.scenario.value,
            "algorithm": self.config.algorithm.value,
            "strategy": self.config.strategy.value,
            "seed": self.seed,
            "total_env_steps": h.total_env_steps,
        })
        try:
            with logger.episode_log(self.run_dir / "episodes.jsonl"):
                next_eval = h.eval_interval
                while self.env_steps < h.total_env_steps:
                    self.train_episode()
                    if self.env_steps >= next_eval:
                        self.record_point()
                        next_eval = (self.env_steps // h.eval_interval + 1) * h.eval_interval
                if not self.metrics.points or self.metrics.points[-1].env_steps != self.env_steps:
                    self.record_point()
            self.save()
            logger.log_run_event(self.run_id, "trained", self.counters())

            finals = final_evaluations(self.run)
            write_final_eval(self.run_dir, finals)
            write_training_curve(self.run_dir, self.metrics)
            logger.log_run_event(self.run_id, "completed", {
                setting: round(report.mean, 4) for setting, report in finals.items()
            })
        except WorkbenchError as e:
            logger.log_run_event(self.run_id, "failed", {"code": e.code}, error=e.message)
            raise
        return self.run_dir


def train(config: ExperimentConfig, seed: Optional[int] = None) -> Path:
    """
    Train one run.

    @param config - Experiment configuration
    @param seed - Seed; defaults to the first configured seed
    @return The run directory
    """
    return TrainingRun(config, config.seeds[0] if seed is None else seed).train()


def _train_payload(payload: Dict[str, Any], seed: int) -> str:
    return str(train(build_config(payload), seed))


def train_seeds(config: ExperimentConfig, workers: int = 1) -> List[Path]:
    """
    Train every configured seed, optionally in a process pool, then write the summary.

    @param config - Experiment configuration
    @param workers - Number of worker processes
    @return Run directories in seed order
    """
    seeds = list(config.seeds)
    if workers > 1 and len(seeds) > 1:
        payload = config.model_dump(mode="json")
        with mp.Pool(processes=min(workers, len(seeds))) as pool:
            run_dirs = [Path(p) for p in pool.starmap(_train_payload, [(payload, s) for s in seeds])]
    else:
        run_dirs = [train(config, seed) for seed in seeds]
    write_summary(config.output_dir, run_dirs, resamples=config.harness.bootstrap_resamples)
    return run_dirs
