import pytest
from hypothesis import settings

from minigraph import catalog
from minigraph.geometry import parse_pair
from minigraph.grid import GridSpec

settings.register_profile("default", deadline=None, max_examples=100, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def osserman():
    return parse_pair(catalog.OSSERMAN_F1, catalog.OSSERMAN_F2)


@pytest.fixture(scope="session")
def grid41():
    return GridSpec(-2.0, 2.0, -2.0, 2.0, 41, 41)


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(-1.0, 1.0, -1.0, 1.0, 11, 11)
