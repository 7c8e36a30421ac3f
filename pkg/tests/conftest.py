import os

import pytest

from xplab import SpVector, WeightedSpace

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def fix():
    """Absolute path of a shipped fixture file."""

    def path(name: str) -> str:
        return os.path.join(FIXTURES, name)

    return path


@pytest.fixture
def pair_space():
    return WeightedSpace(4.0, (1.0, 0.5))


@pytest.fixture
def x_pair(pair_space):
    return SpVector(pair_space, {1: 1.0, 2: 1.0})
