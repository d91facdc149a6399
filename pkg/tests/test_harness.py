"""
Tests for seeding, statistics, evaluation, persistence and result files
"""
import json
import xml.etree.ElementTree as ET

import numpy as np
import pandas as pd
import pytest

from src.envs.base import make_rng
from src.envs.registry import scenario_spec
from src.harness import (
    GRADCHECK_TOLERANCE,
    LoadedRun,
    RunStreams,
    bootstrap_ci,
    build_learner,
    build_model,
    emit_outputs,
    evaluate,
    gradient_suite,
    is_monotone,
    load_run,
    predict_dump,
    save_run,
    summarize,
    sweep_levels,
    sweep_p,
    train,
    write_training_curve,
)
from src.harness.diagnostics import GRADIENT_CASES, PREDICTION_COLUMNS
from src.harness.outputs import CURVE_COLUMNS, SUMMARY_COLUMNS, SWEEP_COLUMNS, read_final_eval, write_sweep
from src.models.config import build_config
from src.models.domain import EvalReport, RunMetrics
from src.utils.errors import CheckpointError, ConfigError, InsufficientDataError

RUN0 = "cv2-iql-maro-seed0"


def _loaded(config, seed=0):
    config = config.for_seed(seed)
    streams = RunStreams(seed)
    spec = scenario_spec(config.scenario, config.env.max_steps)
    learner = build_learner(config, spec, streams.rng("init", 0))
    model = build_model(config, spec, streams.rng("init", 1))
    return LoadedRun(config, seed, spec, learner, model)


@pytest.fixture
def fresh_run(tiny_config):
    """
    An untrained maro run on cv2.

    @returns {LoadedRun} Randomly initialized controllers and model
    """
    return _loaded(tiny_config)


def test_bootstrap_degenerate_samples():
    assert bootstrap_ci([2.5] * 10) == (2.5, 2.5)
    assert bootstrap_ci([7.0]) == (7.0, 7.0)
    with pytest.raises(InsufficientDataError):
        bootstrap_ci([])
    with pytest.raises(ConfigError):
        bootstrap_ci([1.0, 2.0], level=1.0)


def test_bootstrap_width_matches_normal_theory():
    samples = make_rng(0).normal(size=100)
    lo, hi = bootstrap_ci(samples, resamples=10_000, rng=make_rng(1))
    expected = 2 * 1.96 * samples.std() / np.sqrt(100)
    assert abs((hi - lo) - expected) <= 0.3 * expected
    assert lo <= samples.mean() <= hi


def test_summarize_builds_a_report():
    report = summarize("fixed:0.5", [1.0, 2.0, 3.0], resamples=500, rng=make_rng(0))
    assert report.setting == "fixed:0.5"
    assert report.mean == pytest.approx(2.0)
    assert report.n == 3
    assert report.ci_lo <= report.mean <= report.ci_hi


def test_streams_are_independent_and_repeatable():
    streams = RunStreams(3)
    assert streams.rng("env").random() == streams.rng("env").random()
    assert streams.rng("env").random() != streams.rng("comm").random()
    assert streams.rng("eval", 0, 0).random() != streams.rng("eval", 1, 0).random()
    consumed = streams.rng("explore")
    consumed.random(1000)
    assert streams.rng("comm").random() == RunStreams(3).rng("comm").random()
    with pytest.raises(ConfigError):
        streams.rng("weather")
    with pytest.raises(ConfigError):
        RunStreams(-1)


def test_evaluation_is_read_only_and_repeatable(fresh_run):
    controllers = fresh_run.learner.params.checksum()
    model = fresh_run.model.params.checksum()
    first = evaluate(fresh_run, "fixed:0.5", n=4)
    second = evaluate(fresh_run, "fixed:0.5", n=4)
    assert first == second
    assert fresh_run.learner.params.checksum() == controllers
    assert fresh_run.model.params.checksum() == model
    with pytest.raises(ConfigError):
        evaluate(fresh_run, "fixed:0.5", n=0)


def test_sweep_at_full_communication_equals_fixed_one(fresh_run):
    swept = sweep_p(fresh_run, grid=[0.0, 1.0], n=5)
    direct = evaluate(fresh_run, "fixed:1", n=5)
    assert swept[1].returns == direct.returns
    assert (swept[1].ci_lo, swept[1].ci_hi) == (direct.ci_lo, direct.ci_hi)
    assert sweep_levels(swept) == [0.0, 1.0]


def test_oracle_runs_are_evaluated_with_full_communication(tiny_config_values):
    tiny_config_values["strategy"] = "oracle"
    run = _loaded(build_config(tiny_config_values))
    assert run.model is None
    assert evaluate(run, "fixed:0.2", n=2).setting == "fixed:1"
    assert [r.setting for r in sweep_p(run, n=2)] == ["fixed:1"]


def test_is_monotone():
    def report(mean):
        return EvalReport(setting="fixed:0", mean=mean, ci_lo=mean, ci_hi=mean, n=1)
    assert is_monotone([report(-3.0), report(-2.0), report(-2.0)])
    assert not is_monotone([report(-1.0), report(-2.0)])


def test_training_writes_a_complete_run_directory(trained_root):
    run_dir = trained_root / RUN0
    names = {p.name for p in run_dir.iterdir()}
    assert {
        "config.json", "run.json", "controllers.ckpt", "model.ckpt", "metrics.json",
        "final_eval.json", "training_curve.csv", "training_curve.svg", "episodes.jsonl",
    } <= names
    state = json.loads((run_dir / "run.json").read_text())
    assert state["counters"]["env_steps"] == 36
    assert state["counters"]["episodes"] == 6
    assert state["counters"]["train_steps"] == 5
    episodes = (run_dir / "episodes.jsonl").read_text().splitlines()
    assert len(episodes) == 6
    assert set(json.loads(episodes[0])) == {"episode", "seed", "p_drawn", "return"}


def test_training_curve_and_summary_files(trained_root):
    curve = pd.read_csv(trained_root / RUN0 / "training_curve.csv")
    assert list(curve.columns) == CURVE_COLUMNS
    assert curve["step"].tolist() == [12, 24, 36]
    assert (curve["ci_lo"] <= curve["return"]).all()

    summary = pd.read_csv(trained_root / "summary.csv")
    assert list(summary.columns) == SUMMARY_COLUMNS
    assert len(summary) == 1
    assert summary.loc[0, "n_runs"] == 2
    assert summary.loc[0, "n_rollouts"] == 8

    for svg in ("summary.svg", f"{RUN0}/training_curve.svg"):
        root = ET.parse(trained_root / svg).getroot()
        assert root.tag.endswith("svg")


def test_final_evaluations_cover_the_configured_schemes(trained_root):
    reports = read_final_eval(trained_root / RUN0)
    assert list(reports) == ["default", "asymmetric", "dynamic:5"]
    assert all(r.n == 4 for r in reports.values())


def test_training_is_deterministic_per_seed(trained_root, tiny_config):
    run_dir = train(tiny_config, seed=0)
    reference = trained_root / RUN0
    for name in ("training_curve.csv", "controllers.ckpt", "model.ckpt", "episodes.jsonl", "final_eval.json"):
        assert (run_dir / name).read_bytes() == (reference / name).read_bytes()


def test_loaded_run_reproduces_final_evaluation(trained_root):
    run = load_run(trained_root / RUN0)
    stored = read_final_eval(trained_root / RUN0)["default"]
    assert evaluate(run, "default", n=4).returns == stored.returns
    assert run.learner.train_steps == 5


def test_load_run_rejects_mismatches(trained_root, tmp_path):
    with pytest.raises(CheckpointError):
        load_run(tmp_path / "missing")
    with pytest.raises(CheckpointError):
        load_run(trained_root / RUN0, scenario="hs")

    run = load_run(trained_root / RUN0)
    copy_dir = save_run(run, tmp_path / "copy")
    state = json.loads((copy_dir / "run.json").read_text())
    state["scenario_spec"]["obs_dims"] = [5, 5]
    (copy_dir / "run.json").write_text(json.dumps(state))
    with pytest.raises(CheckpointError):
        load_run(copy_dir)


def test_sweep_files(fresh_run, tmp_path):
    reports = sweep_p(fresh_run, grid=[0.0, 0.5, 1.0], n=3)
    paths = write_sweep(tmp_path, reports, sweep_levels(reports))
    frame = pd.read_csv(paths[0])
    assert list(frame.columns) == SWEEP_COLUMNS
    assert frame["p"].tolist() == [0.0, 0.5, 1.0]
    assert ET.parse(paths[1]).getroot().tag.endswith("svg")


def test_emit_outputs_regenerates_tables(trained_root, tmp_path):
    written = {p.name for p in emit_outputs(trained_root)}
    assert {"training_curve.csv", "training_curve.svg", "summary.csv", "summary.svg"} <= written
    with pytest.raises(CheckpointError):
        emit_outputs(tmp_path / "nowhere")
    with pytest.raises(InsufficientDataError):
        emit_outputs(tmp_path)
    with pytest.raises(InsufficientDataError):
        write_training_curve(tmp_path, RunMetrics())


@pytest.mark.parametrize("seed", range(10))
def test_gradient_suite_passes(seed):
    errors = gradient_suite(seed=seed)
    assert set(errors) == set(GRADIENT_CASES)
    assert all(err < GRADCHECK_TOLERANCE for err in errors.values()), errors


def test_predict_dump_pairs_predictions_with_observations(trained_root, tmp_path):
    run = load_run(trained_root / RUN0)
    path = predict_dump(run, tmp_path / "predictions.csv", horizon=3, p=0.0)
    frame = pd.read_csv(path)
    assert list(frame.columns) == PREDICTION_COLUMNS
    assert set(frame["horizon"]) == {1, 2, 3}
    assert set(frame["observer"]) == {0, 1}
    assert frame["t"].max() == 5


def test_predict_dump_needs_a_model(tiny_config_values, tmp_path):
    tiny_config_values["strategy"] = "obs"
    run = _loaded(build_config(tiny_config_values))
    with pytest.raises(ConfigError):
        predict_dump(run, tmp_path / "p.csv")
