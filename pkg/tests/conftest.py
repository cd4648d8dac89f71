import logging

import pytest

from hjbandit.beliefs import ArmModel, GaussianPrior
from hjbandit.lattice import GridSpec

from ._testutil import small_grid


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run full-resolution solves and long simulations",
    )


def pytest_configure(config):
    """Quiet the chatty loggers."""
    for name in ["asyncio", "hjbandit.lattice"]:
        logger = logging.getLogger(name)
        logger.setLevel(logging.INFO)


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def default_prior() -> GaussianPrior:
    return GaussianPrior(0.0, 50.0)


@pytest.fixture
def unit_arm() -> ArmModel:
    return ArmModel.single(1.0)


@pytest.fixture
def grid() -> GridSpec:
    """Coarse one-arm grid for unit reward sd"""
    return small_grid(sigma=1.0)


@pytest.fixture
def desk_grid() -> GridSpec:
    return GridSpec.from_preset("desk", 5.0)
