"""
Gradient checks of every differentiable building block and prediction dumps of trained models.
"""
from pathlib import Path
from typing import Callable, Dict, List, Union

import numpy as np
import pandas as pd

from src.comms.channel import CommChannel
from src.comms.schemes import CommScheme
from src.controllers.mixer import QMixer, mix
from src.controllers.qnet import RecurrentQNet, q_forward
from src.diffcore import ops
from src.diffcore.gradcheck import finite_diff_check
from src.diffcore.nn import gaussian_nll, gru_cell, linear, lstm_cell
from src.diffcore.params import ParamStore, init_gru, init_linear, init_lstm
from src.envs.base import make_rng
from src.envs.registry import make_env, scenario_spec
from src.harness.outputs import write_csv
from src.harness.persistence import LoadedRun
from src.harness.runner import EpisodeRunner
from src.harness.seeding import RunStreams
from src.models.domain import ScenarioId
from src.utils.errors import ConfigError
from src.worldmodel.buffer import ModelEpisode
from src.worldmodel.instance import rollout_predict
from src.worldmodel.model import PredictiveModel, model_loss

GRADCHECK_TOLERANCE = 1e-5
PREDICTION_COLUMNS = ["t", "observer", "agent", "horizon", "dim", "predicted", "actual"]

Case = Callable[[np.random.Generator], float]


def _weighted_sum(out, weights: np.ndarray):
    return ops.sum(out * weights)


def _check_linear(rng: np.random.Generator) -> float:
    params = ParamStore()
    init_linear(params, "fc", 4, 3, rng)
    x, r = rng.normal(size=(2, 4)), rng.normal(size=(2, 3))
    scope = params.scope("fc")
    return finite_diff_check(lambda p: _weighted_sum(linear(x, scope["w"], scope["b"]), r), params)


def _check_gru(rng: np.random.Generator) -> float:
    params = ParamStore()
    init_gru(params, "gru", 3, 4, rng)
    xs, h0, r = rng.normal(size=(2, 2, 3)), rng.normal(size=(2, 4)), rng.normal(size=(2, 4))

    def f(p: ParamStore):
        h = h0
        for x in xs:
            h = gru_cell(x, h, p.scope("gru"))
        return _weighted_sum(h, r)
    return finite_diff_check(f, params)


def _check_lstm(rng: np.random.Generator) -> float:
    params = ParamStore()
    init_lstm(params, "lstm", 3, 4, rng)
    xs, r = rng.normal(size=(2, 2, 3)), rng.normal(size=(2, 4))
    h0, c0 = rng.normal(size=(2, 4)), rng.normal(size=(2, 4))

    def f(p: ParamStore):
        h, c = h0, c0
        for x in xs:
            h, c = lstm_cell(x, h, c, p.scope("lstm"))
        return _weighted_sum(h, r) + _weighted_sum(c, r)
    return finite_diff_check(f, params)


def _check_nll(rng: np.random.Generator) -> float:
    params = ParamStore()
    params.add("mean", rng.normal(size=(3, 2)))
    params.add("logvar", rng.normal(scale=0.5, size=(3, 2)))
    target = rng.normal(size=(3, 2))
    return finite_diff_check(lambda p: gaussian_nll(p["mean"], p["logvar"], target), params)


def _check_q_forward(rng: np.random.Generator) -> float:
    params = ParamStore()
    net = RecurrentQNet(params, "agent0", 5, 3, hidden_dim=4, rng=rng)
    xs, r = rng.normal(size=(3, 2, 5)), rng.normal(size=(2, 3))

    def f(p: ParamStore):
        h, q = net.init_hidden(2), None
        for x in xs:
            q, h = q_forward(net, x, h)
        return _weighted_sum(q, r)
    return finite_diff_check(f, params)


def _check_model_loss(rng: np.random.Generator) -> float:
    spec = scenario_spec(ScenarioId.CV2)
    model = PredictiveModel(spec, hidden_dim=4, rng=rng)
    stream = [[rng.normal(size=d) for d in spec.obs_dims] for _ in range(4)]
    episode = ModelEpisode.from_stream(stream).as_pair()
    return finite_diff_check(lambda p: model_loss(model, [episode]).loss, model.params)


def _check_mixing(rng: np.random.Generator) -> float:
    params = ParamStore()
    mixer = QMixer(params, n_agents=3, state_dim=4, embed_dim=4, hypernet_dim=5, rng=rng)
    params.add("mixing.qs", rng.normal(size=(2, 3)))
    states, r = rng.normal(size=(2, 4)), rng.normal(size=2)
    return finite_diff_check(lambda p: _weighted_sum(mix(mixer, p["mixing.qs"], states), r), params)


GRADIENT_CASES: Dict[str, Case] = {
    "linear": _check_linear,
    "gru_cell": _check_gru,
    "lstm_cell": _check_lstm,
    "gaussian_nll": _check_nll,
    "q_forward": _check_q_forward,
    "model_loss": _check_model_loss,
    "qmix_mixing": _check_mixing,
}


def gradient_suite(seed: int = 0) -> Dict[str, float]:
    """
    Maximum finite-difference relative error of every differentiable block.

    @param seed - Seed of the random weights and inputs
    @return Error per block name
    """
    return {
        name: case(make_rng(np.random.SeedSequence(seed, spawn_key=(k,))))
        for k, (name, case) in enumerate(GRADIENT_CASES.items())
    }


def predict_dump(
    run: LoadedRun,
    path: Union[str, Path],
    horizon: int = 4,
    p: float = 0.0,
) -> Path:
    """
    Multi-step predictions of every agent's model instance along one greedy episode.

    At each step t, every observer's instance predicts o_{t+1} .. o_{t+horizon}
    auto-regressively; rows pair each predicted dimension with the value
    actually observed.

    @param run - Loaded maro or maro_drop run
    @param path - Output CSV
    @param horizon - Prediction horizon
    @param p - Communication level of the episode (fixed:p, full at t = 0)
    @return The written CSV
    """
    if not run.strategy.uses_model:
        raise ConfigError(f"Strategy {run.strategy.value} has no predictive model")
    if horizon < 1:
        raise ConfigError("Horizon must be at least 1", {"horizon": horizon})
    spec = run.spec
    streams = RunStreams(run.seed)
    env = make_env(spec, streams.sequence("eval", 0, 0), run.config.env.collision_penalty)
    runner = EpisodeRunner(env, run.learner, run.strategy, run.model)
    channel = CommChannel(CommScheme.fixed(p), spec.n_agents, streams.rng("eval", 0, 1))

    predictions: Dict[int, List[np.ndarray]] = {}

    def capture(t: int) -> None:
        predictions[t] = [rollout_predict(inst, horizon) for inst in runner.instances]

    result = runner.rollout(channel, on_inputs=capture)
    actual = [np.concatenate(joint) for joint in result.joint_stream]
    slices = spec.obs_slices()
    rows = []
    for t, per_observer in sorted(predictions.items()):
        for observer, trajectory in enumerate(per_observer):
            for k in range(horizon):
                if t + k + 1 >= len(actual):
                    break
                for agent, sl in enumerate(slices):
                    for dim, (pred, true) in enumerate(zip(trajectory[k][sl], actual[t + k + 1][sl])):
                        rows.append([t, observer, agent, k + 1, dim, float(pred), float(true)])
    return write_csv(Path(path), pd.DataFrame(rows, columns=PREDICTION_COLUMNS))
