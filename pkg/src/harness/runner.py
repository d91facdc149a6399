"""
One episode of interaction between the controllers and an environment.

Training episodes build inputs with the strategy's training rule; evaluation
episodes go through a communication channel and the execution rule.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.comms.channel import CommChannel, shared_view
from src.controllers.exploration import select_action
from src.controllers.learners import QLearner
from src.controllers.replay import EpisodeRecord
from src.controllers.reward import RewardStandardizer
from src.envs.base import Env
from src.envs.trajectory import TrajectoryRecorder
from src.models.domain import StrategyId
from src.strategies.inputs import TrainingDropout, build_exec_input, build_train_input
from src.utils.errors import ConfigError
from src.worldmodel.buffer import ModelEpisode
from src.worldmodel.instance import AgentModelInstance, instance_reset
from src.worldmodel.model import PredictiveModel

InputsAt = Callable[[int, Sequence[np.ndarray]], Tuple[List[np.ndarray], np.ndarray]]


@dataclass
class EpisodeResult:
    """
    @param episode_return - Undiscounted sum of raw team rewards
    @param steps - Environment steps taken
    @param p_drawn - Mean off-diagonal sharing probability of the episode, if drops were drawn
    @param record - Replay entry (rewards standardized when a standardizer was given)
    @param model_episode - True joint observation pairs for model training
    @param joint_stream - True joint observations o_0 .. o_T
    """
    episode_return: float
    steps: int
    p_drawn: Optional[float]
    record: EpisodeRecord
    model_episode: ModelEpisode
    joint_stream: List[List[np.ndarray]]


class EpisodeRunner:
    """
    Plays episodes of one environment with one learner.

    @param env - Environment, reset at the start of every episode
    @param learner - Controllers
    @param strategy - Input-construction strategy
    @param model - Shared predictive model (maro strategies)
    """
    def __init__(
        self,
        env: Env,
        learner: QLearner,
        strategy: StrategyId,
        model: Optional[PredictiveModel] = None,
    ):
        if strategy.uses_model and model is None:
            raise ConfigError(f"Strategy {strategy.value} needs a predictive model")
        self.env = env
        self.learner = learner
        self.strategy = strategy
        self.model = model
        self.instances: List[AgentModelInstance] = (
            [AgentModelInstance(model, i) for i in range(env.n_agents)] if strategy.uses_model else []
        )

    def _reset_instances(self) -> None:
        for inst in self.instances:
            instance_reset(inst)

    def collect(
        self,
        epsilon: float,
        explore_rng: np.random.Generator,
        dropout: Optional[TrainingDropout] = None,
        standardizer: Optional[RewardStandardizer] = None,
    ) -> EpisodeResult:
        """
        Play one training episode.

        @param epsilon - Exploration rate of the episode
        @param explore_rng - Exploration stream
        @param dropout - Drop process of strategies that drop in training
        @param standardizer - Running reward statistics, updated as rewards arrive
        """
        n = self.env.n_agents
        p_drawn = None
        if self.strategy.drops_in_training:
            if dropout is None:
                raise ConfigError(f"Strategy {self.strategy.value} needs a training dropout process")
            p_drawn = dropout.reset()
        if self.strategy == StrategyId.MARO_DROP:
            self._reset_instances()
        full = np.ones((n, n), dtype=bool)

        def inputs_at(t: int, joint: Sequence[np.ndarray]):
            mask = dropout.mask(t) if self.strategy.drops_in_training else full
            return build_train_input(self.strategy, self.env.spec, joint, mask, self.instances or None)

        return self._play(inputs_at, epsilon, explore_rng, p_drawn, standardizer)

    def rollout(
        self,
        channel: CommChannel,
        recorder: Optional[TrajectoryRecorder] = None,
        episode: int = 0,
        on_inputs: Optional[Callable[[int], None]] = None,
    ) -> EpisodeResult:
        """
        Play one greedy episode under hybrid execution.

        @param channel - Communication process of the episode, reset here
        @param recorder - Optional trajectory dump
        @param episode - Episode index for the dump
        @param on_inputs - Called with t after every agent built its step-t input
        """
        channel.reset()
        self._reset_instances()
        spec = self.env.spec

        def inputs_at(t: int, joint: Sequence[np.ndarray]):
            mask = channel.mask(t)
            inputs = []
            for i in range(spec.n_agents):
                inst = self.instances[i] if self.instances else None
                inputs.append(build_exec_input(self.strategy, i, shared_view(joint, mask, i), spec, inst))
            if on_inputs is not None:
                on_inputs(t)
            return inputs, mask

        # ε = 0 never touches the exploration stream
        return self._play(
            inputs_at, 0.0, np.random.default_rng(0), channel.p_drawn,
            recorder=recorder, episode=episode,
        )

    def _play(
        self,
        inputs_at: InputsAt,
        epsilon: float,
        explore_rng: np.random.Generator,
        p_drawn: Optional[float],
        standardizer: Optional[RewardStandardizer] = None,
        recorder: Optional[TrajectoryRecorder] = None,
        episode: int = 0,
    ) -> EpisodeResult:
        env = self.env
        n = env.n_agents
        joint = env.reset()
        stream = [joint]
        hidden = self.learner.init_hidden()
        inputs, mask = inputs_at(0, joint)
        input_rows = [inputs]
        masks = [mask]
        actions, raw_rewards, rewards, dones = [], [], [], []
        if recorder is not None:
            recorder.record(0, env, 0.0, episode)

        done = False
        while not done:
            step_actions = []
            for i in range(n):
                q, hidden[i] = self.learner.q_values(i, inputs[i], hidden[i])
                step_actions.append(select_action(q, epsilon, explore_rng))
            result = env.step(step_actions)
            done = result.done
            actions.append(step_actions)
            raw_rewards.append(result.reward)
            rewards.append(
                standardizer.standardize(result.reward) if standardizer is not None else result.reward
            )
            dones.append(float(done))
            stream.append(result.observations)
            if recorder is not None:
                recorder.record(env.t, env, result.reward, episode)
            inputs, mask = inputs_at(env.t, result.observations)
            input_rows.append(inputs)
            masks.append(mask)

        states = np.stack([np.concatenate(j) for j in stream])
        record = EpisodeRecord(
            inputs=[np.stack([row[i] for row in input_rows]) for i in range(n)],
            actions=np.asarray(actions, dtype=np.int64),
            rewards=np.asarray(rewards, dtype=float),
            dones=np.asarray(dones, dtype=float),
            states=states,
            masks=np.stack(masks),
        )
        return EpisodeResult(
            episode_return=float(np.sum(raw_rewards)),
            steps=len(actions),
            p_drawn=p_drawn,
            record=record,
            model_episode=ModelEpisode.from_stream(stream),
            joint_stream=stream,
        )
