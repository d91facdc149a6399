"""
Unit tests for the differentiation core
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.diffcore import ops
from src.diffcore.checkpoint import MAGIC, decode_arrays, encode_arrays, load_params, save_params
from src.diffcore.gradcheck import finite_diff_check
from src.diffcore.nn import HALF_LOG_2PI, gaussian_nll, gru_cell, linear
from src.diffcore.optim import AdamState, adam_step, clip_global_norm, global_norm
from src.diffcore.params import ParamStore, init_gru, init_linear, init_lstm
from src.diffcore.tensor import Tape, Tensor, backward
from src.utils.errors import CheckpointError, ConfigError, DimensionError, NumericalError


def test_gaussian_nll_analytic_values():
    """
    Standard normal log-density at 0 and at 1
    """
    zero = gaussian_nll(np.zeros(1), np.zeros(1), np.zeros(1)).item()
    one = gaussian_nll(np.zeros(1), np.zeros(1), np.ones(1)).item()
    assert abs(zero - 0.5 * math.log(2 * math.pi)) < 1e-12
    assert abs(one - (0.5 * math.log(2 * math.pi) + 0.5)) < 1e-12
    assert HALF_LOG_2PI == pytest.approx(0.9189385332046727)


def test_gaussian_nll_weights_mask_elements():
    mean = np.array([[0.0, 5.0]])
    logvar = np.zeros((1, 2))
    target = np.zeros((1, 2))
    masked = gaussian_nll(mean, logvar, target, weights=np.array([[1.0, 0.0]])).item()
    assert masked == pytest.approx(HALF_LOG_2PI)


def test_tape_records_only_tracked_operations():
    """
    Constants never reach the tape and nothing is recorded without a tape
    """
    w = Tensor(np.ones(3), requires_grad=True)
    c = Tensor(np.ones(3))
    _ = ops.mul(w, 2.0)
    with Tape() as tape:
        ops.mul(c, 2.0)
        assert len(tape) == 0
        ops.sum(ops.mul(w, c))
        assert len(tape) == 2


def test_backward_gives_zero_for_unused_parameters():
    params = ParamStore()
    a = params.add("a", np.array([2.0]))
    params.add("unused", np.ones(2))
    with Tape() as tape:
        loss = ops.sum(ops.square(a))
    grads = backward(tape, loss, params)
    assert grads["a"] == pytest.approx([4.0])
    assert np.array_equal(grads["unused"], np.zeros(2))


def test_backward_requires_scalar_loss():
    params = ParamStore()
    a = params.add("a", np.ones(2))
    with Tape() as tape:
        out = ops.mul(a, 3.0)
    with pytest.raises(DimensionError):
        backward(tape, out, params)


def test_non_finite_output_raises():
    with pytest.raises(NumericalError):
        ops.exp(Tensor(np.array([1000.0])))


def test_matmul_rejects_mismatched_shapes():
    with pytest.raises(DimensionError):
        ops.matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_broadcast_gradients_match_finite_differences(rng):
    params = ParamStore()
    params.add("x", rng.normal(size=(3, 4)))
    params.add("b", rng.normal(size=(4,)))
    weights = rng.normal(size=(3, 4))

    def f(p):
        return ops.sum(ops.tanh(p["x"] * p["b"] + p["b"]) * weights)

    assert finite_diff_check(f, params) < 1e-6


def test_gather_concat_stack_gradients(rng):
    params = ParamStore()
    params.add("q", rng.normal(size=(4, 3)))
    params.add("extra", rng.normal(size=(4, 2)))
    picks = np.array([0, 2, 1, 2])

    def f(p):
        joined = ops.concat([p["q"], p["extra"]], axis=-1)
        chosen = ops.gather(joined, picks)
        stacked = ops.stack([chosen, ops.sigmoid(chosen)])
        return ops.sum(ops.square(stacked))

    assert finite_diff_check(f, params) < 1e-6


def test_gather_rejects_out_of_range_index():
    with pytest.raises(DimensionError):
        ops.gather(np.zeros((2, 3)), np.array([0, 3]))


def test_recurrent_cells_have_expected_shapes(rng):
    params = ParamStore()
    gru = init_gru(params, "gru", 3, 5, rng)
    init_lstm(params, "lstm", 3, 5, rng)
    h = gru_cell(rng.normal(size=(2, 3)), np.zeros((2, 5)), gru)
    assert h.shape == (2, 5)
    assert params["lstm.b"].data[5:10] == pytest.approx(np.ones(5))


def test_linear_checks_input_width(rng):
    params = ParamStore()
    fc = init_linear(params, "fc", 3, 2, rng)
    with pytest.raises(DimensionError):
        linear(np.ones((1, 4)), fc["w"], fc["b"])


def test_adam_first_step_moves_by_learning_rate():
    """
    With bias correction the first update is lr * sign(g)
    """
    params = ParamStore()
    params.add("w", np.array([1.0, -1.0, 0.5]))
    state = AdamState.for_params(params)
    adam_step(params, {"w": np.array([0.3, -2.0, 10.0])}, state, lr=0.01)
    assert params["w"].data == pytest.approx([0.99, -0.99, 0.49], abs=1e-6)
    assert state.step == 1


def test_clip_global_norm_rescales_and_validates():
    grads = {"a": np.array([3.0]), "b": np.array([4.0])}
    clipped = clip_global_norm(grads, 1.0)
    assert global_norm(clipped) == pytest.approx(1.0)
    assert clip_global_norm(grads, 10.0)["a"] == pytest.approx([3.0])
    with pytest.raises(ConfigError):
        clip_global_norm(grads, 0.0)


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, (5,), elements=st.floats(-1e3, 1e3)),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_clipped_norm_never_exceeds_ceiling(values, max_norm):
    clipped = clip_global_norm({"g": values}, max_norm)
    assert global_norm(clipped) <= max_norm * (1 + 1e-9)


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, (4,), elements=st.floats(-1e3, 1e3)),
    arrays(np.float64, (2, 3), elements=st.floats(-1e3, 1e3)),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_clipping_twice_changes_nothing(a, b, max_norm):
    once = clip_global_norm({"a": a, "b": b}, max_norm)
    twice = clip_global_norm(once, max_norm)
    for name in once:
        assert twice[name] == pytest.approx(once[name], rel=1e-9, abs=1e-12)


def test_adam_minimizes_a_quadratic():
    params = ParamStore()
    params.add("w", np.array([1.0]))
    state = AdamState.for_params(params)
    for _ in range(100):
        adam_step(params, {"w": 2.0 * params["w"].data}, state, lr=0.05)
    assert abs(params["w"].data[0]) < 0.1
    assert state.step == 100


def test_adam_zero_gradient_keeps_weights():
    params = ParamStore()
    params.add("w", np.array([0.7, -1.3]))
    state = AdamState.for_params(params)
    adam_step(params, {"w": np.zeros(2)}, state, lr=0.1)
    assert params["w"].data.tolist() == [0.7, -1.3]
    with pytest.raises(DimensionError):
        adam_step(params, {"w": np.zeros(3)}, state, lr=0.1)


def test_checkpoint_round_trip(tmp_path, rng):
    params = ParamStore()
    init_gru(params, "agent0.gru", 4, 3, rng)
    init_linear(params, "agent0.head", 3, 5, rng)
    path = save_params(tmp_path / "controllers.ckpt", params)
    assert path.read_bytes().startswith(MAGIC)

    fresh = ParamStore()
    init_gru(fresh, "agent0.gru", 4, 3, None)
    init_linear(fresh, "agent0.head", 3, 5, None)
    load_params(path, fresh)
    assert fresh.checksum() == params.checksum()


def test_checkpoint_rejects_bad_magic_and_truncation():
    with pytest.raises(CheckpointError):
        decode_arrays(b"NOT-A-CHECKPOINT")
    payload = encode_arrays({"w": np.ones((2, 2))})
    with pytest.raises(CheckpointError):
        decode_arrays(payload[:-5])


def test_load_params_rejects_missing_names(tmp_path):
    source = ParamStore()
    source.add("a", np.ones(2))
    path = save_params(tmp_path / "a.ckpt", source)
    target = ParamStore()
    target.add("b", np.ones(2))
    with pytest.raises(CheckpointError):
        load_params(path, target)
