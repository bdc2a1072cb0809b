import numpy as np
import pytest

from gp4nldr.datasets import wine_dataset


@pytest.fixture(scope="session")
def wine():
    return wine_dataset()


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
