import pytest

from gdnls import Grid


@pytest.fixture(scope="session")
def grid():
    """Workhorse grid shared by the randomized sweeps."""
    return Grid(60.0, 2048)
