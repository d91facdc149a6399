"""
Unit tests for controller input construction
"""
import numpy as np
import pytest

from src.comms import CommScheme, shared_view
from src.envs import make_env, scenario_spec
from src.envs.base import make_rng
from src.models.domain import StrategyId
from src.strategies import TrainingDropout, build_exec_input, build_train_input, input_dim
from src.utils.errors import ConfigError, ProtocolViolation
from src.worldmodel import AgentModelInstance, PredictiveModel, instance_reset


@pytest.fixture
def sbf():
    """
    SpreadBlindfold spec and one joint observation.

    @returns {tuple} (ScenarioSpec, list of observations)
    """
    spec = scenario_spec("sbf")
    return spec, make_env(spec, seed=8).reset()


@pytest.mark.parametrize(
    "strategy,expected",
    [
        ("obs", 10),
        ("oracle", 30),
        ("masked_joint", 30),
        ("md", 30),
        ("md_masks", 33),
        ("maro", 30),
        ("maro_drop", 30),
    ],
)
def test_input_dimensions(strategy, expected):
    spec = scenario_spec("sbf")
    assert all(input_dim(strategy, spec, i) == expected for i in range(3))


def test_unknown_strategy_is_a_config_error():
    with pytest.raises(ConfigError):
        input_dim("telepathy", scenario_spec("sbf"), 0)


def test_full_communication_gives_identical_inputs(sbf, rng):
    """
    With every link up the joint strategies all see the true joint observation
    """
    spec, joint = sbf
    full = np.ones((3, 3), dtype=bool)
    expected = np.concatenate(joint)
    inst = AgentModelInstance(PredictiveModel(spec, hidden_dim=4, rng=rng), 1)
    instance_reset(inst)
    for strategy in ("oracle", "masked_joint", "md", "maro", "maro_drop"):
        model_inst = inst if strategy.startswith("maro") else None
        if model_inst is not None:
            instance_reset(model_inst)
        x = build_exec_input(strategy, 1, shared_view(joint, full, 1), spec, model_inst)
        assert np.array_equal(x, expected)
    md_masks = build_exec_input("md_masks", 1, shared_view(joint, full, 1), spec)
    assert np.array_equal(md_masks[:30], expected)
    assert md_masks[30:].tolist() == [1.0, 1.0, 1.0]


def test_absent_slots_are_zero_filled_with_flags(sbf):
    spec, joint = sbf
    view = shared_view(joint, np.eye(3, dtype=bool), 0)
    x = build_exec_input(StrategyId.MD_MASKS, 0, view, spec)
    assert np.array_equal(x[:10], joint[0])
    assert not x[10:30].any()
    assert x[30:].tolist() == [1.0, 0.0, 0.0]
    assert np.array_equal(build_exec_input("obs", 0, view, spec), joint[0])


def test_oracle_refuses_incomplete_views(sbf):
    spec, joint = sbf
    view = shared_view(joint, np.eye(3, dtype=bool), 2)
    with pytest.raises(ProtocolViolation):
        build_exec_input("oracle", 2, view, spec)
    with pytest.raises(ProtocolViolation):
        build_exec_input("masked_joint", 1, view, spec)
    with pytest.raises(ConfigError):
        build_exec_input("maro", 2, view, spec)


def test_training_inputs_apply_drops_only_where_trained_with_them(sbf, rng):
    spec, joint = sbf
    cut = np.eye(3, dtype=bool)
    inputs, applied = build_train_input("masked_joint", spec, joint, cut)
    assert applied.all()
    assert np.array_equal(inputs[0], np.concatenate(joint))

    inputs, applied = build_train_input("md", spec, joint, cut)
    assert np.array_equal(applied, cut)
    assert not inputs[0][10:].any()

    with pytest.raises(ConfigError):
        build_train_input("maro_drop", spec, joint, cut)
    model = PredictiveModel(spec, hidden_dim=4, rng=rng)
    instances = [AgentModelInstance(model, i) for i in range(3)]
    for inst in instances:
        instance_reset(inst)
    inputs, _ = build_train_input("maro_drop", spec, joint, np.ones((3, 3), dtype=bool), instances)
    assert all(np.array_equal(x, np.concatenate(joint)) for x in inputs)


def test_training_dropout_draws_p_per_episode():
    dropout = TrainingDropout(CommScheme(kind="default"), 3, make_rng(6))
    draws = [dropout.reset() for _ in range(50)]
    assert all(0.0 <= p <= 1.0 for p in draws)
    assert len(set(draws)) == 50
    assert dropout.mask(0).all()
    assert dropout.mask(1).shape == (3, 3)
