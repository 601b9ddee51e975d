import numpy as np
import pytest

from erasurekit import preset, random_density


@pytest.fixture
def mixed_qubit():
    return np.eye(2, dtype=complex) / 2


def random_channel(d, kraus, seed):
    return preset("random", dim=d, kraus=kraus, seed=seed)


def random_state(d, seed):
    return random_density(d, seed)
