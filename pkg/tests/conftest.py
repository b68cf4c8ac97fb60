import random

import pytest

from gal.config import DEFAULT_SEED


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED, help="Seed for randomised parameter grids.")


@pytest.fixture
def rng(request) -> random.Random:
    return random.Random(request.config.getoption("--seed"))
