"""
Pytest setup: test env before projsum is loaded, and the `slow` marker for full-scale Monte Carlo runs
(skipped unless --runslow is given).
"""
import os
import sys

import pytest

os.environ.setdefault("PROJSUM_LOG_LEVEL", "WARNING")
os.environ.setdefault("PROJSUM_ATOM_TOL", "1e-8")
os.environ.pop("PROJSUM_DEBUG", None)

# Ensure projsum is importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-scale Monte Carlo tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale Monte Carlo acceptance run (minutes)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
