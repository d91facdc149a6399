"""
Tests for experiment configuration and the flat config loader
"""
from pathlib import Path

import pytest

from src.models.config import build_config, load_config, nest_flat
from src.models.domain import Algorithm, ScenarioId, StrategyId
from src.utils.errors import ConfigError


def test_table_defaults_depend_on_algorithm_and_task():
    particle = build_config({"scenario": "sxy2", "algorithm": "qmix"})
    assert particle.controllers.learning_rate == 5e-4
    assert particle.controllers.epsilon_anneal == 50_000
    foraging = build_config({"scenario": "lbf", "algorithm": "qmix"})
    assert foraging.controllers.learning_rate == 1e-4
    assert foraging.controllers.epsilon_anneal == 100_000
    iql = build_config({"scenario": "lbf8"})
    assert iql.algorithm == Algorithm.IQL
    assert iql.controllers.learning_rate == 3e-4


def test_explicit_values_win_over_table_defaults():
    config = build_config({"scenario": "hs", "controllers": {"learning_rate": 0.01, "epsilon_anneal": 10}})
    assert config.controllers.learning_rate == 0.01
    assert config.controllers.epsilon_anneal == 10


def test_defaults():
    config = build_config({"scenario": "sbf"})
    assert config.strategy == StrategyId.MARO
    assert config.seeds == [0]
    assert config.controllers.hidden_dim == 256
    assert config.controllers.target_update == 200
    assert config.controllers.reward_standardisation is True
    assert config.harness.final_schemes == ["default", "asymmetric", "dynamic:5"]


@pytest.mark.parametrize(
    "values",
    [
        {},
        {"scenario": "pong"},
        {"scenario": "hs", "strategy": "telepathy"},
        {"scenario": "hs", "seeds": [-1]},
        {"scenario": "hs", "controllers": {"hidden_dim": 0}},
        {"scenario": "hs", "controllers": {"momentum": 0.9}},
        {"scenario": "hs", "comms": {"eval_scheme": "fixed:2"}},
        {"scenario": "hs", "harness": {"final_schemes": ""}},
    ],
)
def test_invalid_configs_raise_config_error(values):
    with pytest.raises(ConfigError) as exc:
        build_config(values)
    assert exc.value.code == "invalid_config"


def test_nest_flat_groups_sections():
    nested = nest_flat({"scenario": "hs", "controllers.gamma": "0.9", "harness.eval_interval": "5"})
    assert nested == {"scenario": "hs", "controllers": {"gamma": "0.9"}, "harness": {"eval_interval": "5"}}
    with pytest.raises(ConfigError):
        nest_flat({"optimizer.lr": "1"})
    with pytest.raises(ConfigError):
        nest_flat({"scenario": ""})


def test_load_config_reads_file_and_applies_overrides(tmp_path):
    path = tmp_path / "experiment.env"
    path.write_text(
        "# sxy4 with drops\n"
        "scenario=sxy4\n"
        "strategy=md_masks\n"
        "seeds=1, 2,3\n"
        "controllers.gamma=0.95\n"
        "harness.final_schemes=fixed:0.50,default\n"
    )
    config = load_config(path, {"controllers.gamma": "0.9", "algorithm": "qmix"})
    assert config.scenario == ScenarioId.SXY4
    assert config.strategy == StrategyId.MD_MASKS
    assert config.seeds == [1, 2, 3]
    assert config.controllers.gamma == 0.9
    assert config.algorithm == Algorithm.QMIX
    assert config.harness.final_schemes == ["fixed:0.5", "default"]


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.env")


def test_run_names_and_seed_copies(tiny_config):
    assert tiny_config.run_name(4) == "cv2-iql-maro-seed4"
    copy = tiny_config.for_seed(4)
    assert copy.seeds == [4]
    assert tiny_config.seeds == [0]


@pytest.mark.parametrize("path", sorted((Path(__file__).parent.parent / "configs").glob("*.env")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    config = load_config(path)
    assert config.run_name(config.seeds[0]).startswith(config.scenario.value)
