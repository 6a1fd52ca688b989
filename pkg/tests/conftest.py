"""
Shared pytest fixtures
Location: tests/conftest.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from geometry import corpus  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the full acceptance sweeps")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full acceptance sweeps, run with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ============= FIXTURES =============

@pytest.fixture
def data_dir():
    """Return path to the corpus data directory."""
    return Path(__file__).parent.parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)


@pytest.fixture
def square_torus():
    return corpus.square_torus()


@pytest.fixture
def two_rectangle_torus():
    return corpus.two_rectangle_torus(mark_branch_points=True)


@pytest.fixture
def octagon():
    return corpus.octagon_surface()


@pytest.fixture
def pillowcase():
    return corpus.pillowcase()


@pytest.fixture
def cylinder_c1():
    return corpus.cylinder(1.0)


@pytest.fixture
def slit_cylinder():
    return corpus.slit_cylinder()
