import numpy as np
import pytest

from specdenoise import build_default_grid


@pytest.fixture(scope="session")
def grid():
    return build_default_grid()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
