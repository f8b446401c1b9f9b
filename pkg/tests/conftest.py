"""Shared fixtures and command-line options for the test suite."""

from __future__ import annotations

import os
import random
import sys

import pytest

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from scripts.core import parse_instance  # noqa: E402

DATA_DIR = os.path.join(PROJECT_ROOT, "data")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240611,
                     help="Seed for the random instance generator.")
    parser.addoption("--runslow", action="store_true", default=False,
                     help="Run the exhaustive acceptance tests marked slow.")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive acceptance run, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng(request) -> random.Random:
    return random.Random(request.config.getoption("--seed"))


@pytest.fixture
def p1():
    return parse_instance('{"m": 6, "absent": [[3], [1, 2, 3, 4], [3, 4, 5, 6]]}')


@pytest.fixture
def p2():
    return parse_instance('{"m": 5, "absent": [[1, 2], [1, 2, 4], [1, 3], [1, 3, 5]]}')


@pytest.fixture
def data_dir() -> str:
    return DATA_DIR
