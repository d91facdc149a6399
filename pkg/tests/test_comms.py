"""
Unit tests for communication schemes, masks and shared views
"""
import numpy as np
import pytest

from src.comms import CommChannel, CommScheme, draw_mask, sample_matrix, shared_view
from src.envs.base import make_rng
from src.utils.errors import ConfigError, ScenarioError


@pytest.mark.parametrize(
    "text,expected",
    [
        ("fixed:0.3", CommScheme(kind="fixed", p=0.3)),
        ("default", CommScheme(kind="default")),
        ("Asymmetric", CommScheme(kind="asymmetric")),
        ("dynamic:7", CommScheme(kind="dynamic", interval=7)),
        ("dynamic", CommScheme(kind="dynamic", interval=5)),
    ],
)
def test_parse_schemes(text, expected):
    assert CommScheme.parse(text) == expected


@pytest.mark.parametrize("text", ["fixed", "fixed:1.5", "fixed:abc", "dynamic:0", "sometimes", "default:2"])
def test_parse_rejects_bad_schemes(text):
    with pytest.raises(ConfigError):
        CommScheme.parse(text)


def test_scheme_string_round_trips_through_parse():
    for text in ["fixed:0.5", "fixed:1", "default", "dynamic:5"]:
        assert str(CommScheme.parse(text)) == text


@pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 0.8, 1.0])
def test_fixed_masks_match_p(p):
    """
    Off-diagonal link frequency over 10k draws is within 0.02 of p
    """
    rng = make_rng(7)
    C = sample_matrix(CommScheme.fixed(p), 3, rng)
    masks = np.stack([draw_mask(C, 1, rng) for _ in range(10_000)])
    off = ~np.eye(3, dtype=bool)
    assert abs(masks[:, off].mean() - p) <= 0.02
    assert masks[:, np.eye(3, dtype=bool)].all()


def test_first_step_is_fully_connected():
    rng = make_rng(0)
    C = sample_matrix(CommScheme.fixed(0.0), 4, rng)
    assert draw_mask(C, 0, rng).all()
    assert not draw_mask(C, 1, rng)[~np.eye(4, dtype=bool)].any()


def test_default_scheme_shares_one_probability():
    C = sample_matrix(CommScheme(kind="default"), 3, make_rng(4))
    off = C[~np.eye(3, dtype=bool)]
    assert np.all(off == off[0])
    assert 0.0 <= off[0] <= 1.0
    assert np.all(np.diag(C) == 1.0)


def test_asymmetric_entries_are_independent():
    C = sample_matrix(CommScheme(kind="asymmetric"), 4, make_rng(4))
    off = C[~np.eye(4, dtype=bool)]
    assert len(set(off.tolist())) == off.size


def test_asymmetric_directions_are_uncorrelated():
    rng = make_rng(11)
    draws = np.stack([sample_matrix(CommScheme(kind="asymmetric"), 2, rng) for _ in range(5000)])
    forward, reverse = draws[:, 0, 1], draws[:, 1, 0]
    assert abs(np.corrcoef(forward, reverse)[0, 1]) < 0.05
    assert forward.mean() == pytest.approx(0.5, abs=0.02)

    shared = np.stack([sample_matrix(CommScheme(kind="default"), 2, rng) for _ in range(200)])
    assert np.array_equal(shared[:, 0, 1], shared[:, 1, 0])


def test_dynamic_channel_redraws_at_interval_multiples():
    channel = CommChannel(CommScheme.parse("dynamic:5"), 3, make_rng(9))
    channel.reset()
    seen = [channel.matrix.copy()]
    for t in range(0, 16):
        channel.mask(t)
        if not np.array_equal(channel.matrix, seen[-1]):
            seen.append(channel.matrix.copy())
            assert t % 5 == 0 and t > 0
    assert channel.epochs == 4
    assert len(seen) == 4


def test_channel_reports_p_drawn():
    channel = CommChannel(CommScheme.fixed(0.25), 3, make_rng(0))
    assert channel.p_drawn is None
    channel.reset()
    assert channel.p_drawn == pytest.approx(0.25)
    single = CommChannel(CommScheme.fixed(0.25), 1, make_rng(0))
    single.reset()
    assert single.p_drawn is None


def test_shared_view_hides_absent_teammates():
    joint = [np.array([1.0]), np.array([2.0, 3.0]), np.array([4.0])]
    mask = np.array([[True, False, True], [True, True, True], [False, False, True]])
    view = shared_view(joint, mask, 0)
    assert view.observations[1] is None
    assert view.observations[2] == pytest.approx([4.0])
    assert not view.is_complete
    assert shared_view(joint, mask, 1).is_complete
    with pytest.raises(ScenarioError):
        shared_view(joint, mask, 3)


def test_sample_matrix_needs_agents():
    with pytest.raises(ConfigError):
        sample_matrix(CommScheme.fixed(0.5), 0, make_rng(0))
