import numpy as np
import pytest

from manistat.geometry import ManifoldDescriptor
from tests.config import SEED


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run the Monte Carlo acceptance checks",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="Monte Carlo check, use --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(
    params=[
        ManifoldDescriptor.sphere(6),
        ManifoldDescriptor.spd(3),
        ManifoldDescriptor.euclidean(4),
    ],
    ids=["sphere", "spd", "euclidean"],
)
def descriptor(request):
    return request.param
