"""
Unit tests for the particle and foraging scenarios
"""
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.envs import (
    Action,
    ParticleWorld,
    TrajectoryRecorder,
    count_collisions,
    make_env,
    physics_step,
    scenario_spec,
    spread_reward,
)
from src.utils.errors import ScenarioError


@pytest.mark.parametrize(
    "scenario,obs_dims,action_counts",
    [
        ("hs", [2, 8], [5, 5]),
        ("sxy2", [8, 8], [5, 5]),
        ("sxy4", [12, 12, 12, 12], [5, 5, 5, 5]),
        ("sbf", [10, 10, 10], [5, 5, 5]),
        ("sl", [3, 11], [3, 5]),
        ("lbf", [12, 12], [6, 6]),
        ("lbf8", [12, 12], [6, 6]),
        ("cv2", [4, 4], [5, 5]),
    ],
)
def test_scenario_dimensions(scenario, obs_dims, action_counts):
    spec = scenario_spec(scenario)
    assert spec.obs_dims == obs_dims
    assert spec.action_counts == action_counts
    env = make_env(spec, seed=3)
    joint = env.reset()
    assert [o.shape[0] for o in joint] == obs_dims
    result = env.step([0] * spec.n_agents)
    assert [o.shape[0] for o in result.observations] == obs_dims


def test_unknown_scenario_is_rejected():
    with pytest.raises(ScenarioError):
        scenario_spec("pong")


def test_reset_is_deterministic_per_seed():
    first = make_env("sbf", seed=11).reset()
    second = make_env("sbf", seed=11).reset()
    other = make_env("sbf", seed=12).reset()
    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    assert not np.array_equal(first[0], other[0])


def test_physics_step_damps_and_integrates():
    world = ParticleWorld(
        positions=np.zeros((1, 2)),
        velocities=np.array([[1.0, 0.0]]),
        landmarks=np.zeros((1, 2)),
    )
    physics_step(world, np.zeros((1, 2)))
    assert world.velocities[0] == pytest.approx([0.75, 0.0])
    assert world.positions[0] == pytest.approx([0.075, 0.0])


def test_collisions_and_spread_reward():
    positions = np.array([[0.0, 0.0], [0.2, 0.0], [1.0, 1.0]])
    assert count_collisions(positions) == 1
    agents = np.array([[0.0, 0.0], [1.0, 0.0]])
    landmarks = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert spread_reward(agents, landmarks, 0) == pytest.approx(-1.0)
    assert spread_reward(agents, landmarks, 1, penalty=1.0) == pytest.approx(-3.0)
    with pytest.raises(ScenarioError):
        spread_reward(agents, np.zeros((0, 2)), 0)


def test_action_validation():
    env = make_env("sxy2", seed=0)
    with pytest.raises(ScenarioError):
        env.step([0])
    with pytest.raises(ScenarioError):
        env.step([0, 5])
    with pytest.raises(ScenarioError):
        env.observe(2)


def test_episode_ends_at_max_steps():
    env = make_env(scenario_spec("hs", max_steps=3), seed=0)
    env.reset()
    dones = [env.step([1, 2]).done for _ in range(3)]
    assert dones == [False, False, True]
    with pytest.raises(ScenarioError):
        env.step([0, 0])


def test_constant_velocity_world_has_exact_deltas():
    env = make_env("cv2", seed=5)
    before = env.reset()
    pointing = [env.pointing_action(0), env.pointing_action(1)]
    result = env.step(pointing)
    for i in range(2):
        velocity = before[i][2:]
        delta = result.observations[i] - before[i]
        assert delta[:2] == pytest.approx(velocity * 0.1, abs=1e-12)
        assert delta[2:] == pytest.approx([0.0, 0.0], abs=1e-12)
    assert result.reward == 0.0


def test_constant_velocity_reward_counts_wrong_pointers():
    env = make_env("cv2", seed=5)
    env.reset()
    wrong = 0 if env.pointing_action(0) != 0 else 1
    result = env.step([wrong, env.pointing_action(1)])
    assert result.reward == pytest.approx(-0.5)


def test_speaker_symbol_arrives_next_step():
    env = make_env("sl", seed=2)
    joint = env.reset()
    assert joint[1][-3:] == pytest.approx([0.0, 0.0, 0.0])
    speaker_pos = env.world.positions[0].copy()
    result = env.step([2, 1])
    assert result.observations[1][-3:] == pytest.approx([0.0, 0.0, 1.0])
    assert env.world.positions[0] == pytest.approx(speaker_pos)


def test_hear_see_has_no_collision_penalty():
    env = make_env("hs", seed=0, collision_penalty=100.0)
    env.reset()
    env.world.positions[:] = 0.0
    env.world.landmarks[:] = 0.0
    assert env.reward([0, 0]) == pytest.approx(0.0)


def _foraging(levels, agents, foods):
    env = make_env("lbf8", seed=0)
    env.reset()
    w = env.world
    w.agent_levels = np.array(levels)
    w.agent_positions = np.array(agents)
    w.food_positions = np.array(foods)
    w.food_levels = np.full(len(foods), int(np.sum(levels)))
    w.food_alive = np.ones(len(foods), dtype=bool)
    return env


def test_foraging_requires_joint_load():
    env = _foraging([1, 1], [[3, 3], [3, 5]], [[3, 4], [6, 6]])
    alone = env.step([Action.LOAD, Action.NONE])
    assert alone.reward == 0.0
    together = env.step([Action.LOAD, Action.LOAD])
    assert together.reward == pytest.approx(0.5)
    assert not env.world.food_alive[0]
    assert env.world.food_alive[1]


def test_foraging_moves_are_blocked_by_food_and_contested_cells():
    env = _foraging([1, 2], [[3, 3], [3, 5]], [[2, 3], [6, 6]])
    env.step([Action.NORTH, Action.NONE])
    assert env.world.agent_positions[0].tolist() == [3, 3]
    env.step([Action.EAST, Action.WEST])
    assert env.world.agent_positions.tolist() == [[3, 3], [3, 5]]
    env.step([Action.WEST, Action.EAST])
    assert env.world.agent_positions.tolist() == [[3, 2], [3, 6]]


def test_foraging_episode_ends_when_all_food_is_loaded():
    env = _foraging([1, 1], [[3, 3], [3, 5]], [[3, 4], [4, 4]])
    first = env.step([Action.LOAD, Action.LOAD])
    assert first.reward == pytest.approx(0.5)
    assert not first.done
    moved = env.step([Action.SOUTH, Action.SOUTH])
    assert env.world.agent_positions.tolist() == [[4, 3], [4, 5]]
    last = env.step([Action.LOAD, Action.LOAD])
    assert last.done
    assert first.reward + moved.reward + last.reward == pytest.approx(1.0)
    with pytest.raises(ScenarioError):
        env.step([Action.NONE, Action.NONE])


def test_foraging_world_with_a_single_food():
    env = _foraging([1, 1], [[3, 3], [3, 5]], [[3, 4]])
    assert env.observe(0).shape == (12,)
    assert env.observe(0)[6:9].tolist() == [-1.0, -1.0, -1.0]
    result = env.step([Action.LOAD, Action.LOAD])
    assert result.done
    assert result.reward == pytest.approx(1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_foraging_return_stays_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    env = make_env("lbf8", seed=seed)
    env.reset()
    total, done = 0.0, False
    while not done:
        result = env.step(rng.integers(len(Action), size=2))
        assert result.reward >= 0.0
        total += result.reward
        done = result.done
    assert 0.0 <= total <= 1.0 + 1e-12


@pytest.mark.parametrize("scenario", ["hs", "sxy2", "sxy4", "sbf", "sl", "cv2"])
def test_particle_rewards_are_never_positive(scenario):
    rng = np.random.default_rng(7)
    spec = scenario_spec(scenario)
    for seed in range(3):
        env = make_env(spec, seed=seed)
        env.reset()
        done = False
        while not done:
            result = env.step([rng.integers(a) for a in spec.action_counts])
            assert result.reward <= 0.0
            done = result.done


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, (4, 2), elements=st.floats(-2.0, 2.0)),
    arrays(np.float64, (3, 2), elements=st.floats(-2.0, 2.0)),
    st.permutations(range(4)),
    st.permutations(range(3)),
    st.integers(min_value=0, max_value=6),
)
def test_spread_reward_ignores_ordering(agents, landmarks, agent_order, landmark_order, collisions):
    reward = spread_reward(agents, landmarks, collisions)
    shuffled = spread_reward(agents[list(agent_order)], landmarks[list(landmark_order)], collisions)
    assert shuffled == pytest.approx(reward, abs=1e-12)
    assert reward <= 0.0


def test_trajectory_recorder_writes_json_lines(tmp_path):
    env = make_env("sxy2", seed=1)
    env.reset()
    recorder = TrajectoryRecorder()
    recorder.record(0, env, 0.0)
    result = env.step([1, 3])
    recorder.record(1, env, result.reward)
    path = recorder.write(tmp_path / "traj.jsonl")
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert len(lines) == 4
    assert set(lines[0]) == {"episode", "t", "agent", "pos", "vel", "reward"}
    assert lines[-1]["t"] == 1
