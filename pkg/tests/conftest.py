"""
Shared fixtures for the workbench tests
"""
import pytest
from dotenv import load_dotenv

from src.envs.base import make_rng
from src.harness.training import train_seeds
from src.models.config import build_config

# Load environment variables from .env file at the start of testing
load_dotenv()


def _tiny_values(output_dir):
    return {
        "scenario": "cv2",
        "algorithm": "iql",
        "strategy": "maro",
        "output_dir": str(output_dir),
        "env": {"max_steps": 6},
        "controllers": {
            "hidden_dim": 8,
            "batch_size": 2,
            "buffer_size": 50,
            "epsilon_anneal": 100,
            "target_update": 5,
        },
        "worldmodel": {"hidden_dim": 6, "batch_size": 2, "buffer_size": 50},
        "harness": {
            "total_env_steps": 36,
            "eval_interval": 12,
            "eval_rollouts": 3,
            "final_rollouts": 4,
            "bootstrap_resamples": 200,
        },
    }


@pytest.fixture
def rng():
    """
    Deterministic generator for test data.

    @returns {np.random.Generator} A Philox generator seeded with 1234
    """
    return make_rng(1234)


@pytest.fixture
def tiny_config_values(tmp_path):
    """
    Nested config values for a run that trains in a few seconds.

    @returns {dict} Values accepted by build_config
    """
    return _tiny_values(tmp_path / "runs")


@pytest.fixture
def tiny_config(tiny_config_values):
    """
    A validated tiny experiment configuration.

    @returns {ExperimentConfig} Config for a cv2 maro run
    """
    return build_config(tiny_config_values)


@pytest.fixture(scope="session")
def trained_root(tmp_path_factory):
    """
    Two tiny maro runs (seeds 0 and 1) trained once per session.

    @returns {Path} Output directory holding both run directories and the summary
    """
    root = tmp_path_factory.mktemp("trained") / "runs"
    values = _tiny_values(root)
    values["seeds"] = [0, 1]
    train_seeds(build_config(values))
    return root
