"""
Pytest configuration for end-to-end reproduction tests
"""
import os

import pytest

RUN_SLOW = os.getenv("HMARL_RUN_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    """
    Skip slow reproductions unless HMARL_RUN_SLOW=1
    """
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="set HMARL_RUN_SLOW=1 to run training reproductions")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def workers():
    """
    Number of parallel training processes.

    @returns {int} HMARL_WORKERS, default 1
    """
    return int(os.getenv("HMARL_WORKERS", "1"))
