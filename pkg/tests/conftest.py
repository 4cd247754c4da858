import numpy as np
import pytest

from qdeleter.state import bloch_to_density


def random_ball(rng, n):
    """Points uniform in the unit ball."""
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(size=(n, 1)) ** (1 / 3)


def random_density(rng, n):
    return [bloch_to_density(b) for b in random_ball(rng, n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20061014)
