import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def rand_tensor(seed, shape):
    return np.random.default_rng(seed).standard_normal(shape)
