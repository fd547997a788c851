import numpy as np
import pytest

from pneumpc import PlantParams


@pytest.fixture(scope="session")
def params():
    return PlantParams()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240615)
