import numpy as np
import pytest

from msmlab.spectral import Grid


@pytest.fixture(scope="session")
def unit_grid():
    """Small grid over the 2*pi torus where modes are integers."""
    return Grid(32, 2.0 * np.pi)


@pytest.fixture(scope="session")
def lab_grid():
    """Small instance of the default large torus."""
    return Grid(32, 8.0 * np.pi)
