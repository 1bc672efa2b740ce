import numpy as np
import pytest
from app.channel.model import NetworkSpec, bec_route, bsc_route
from app.codes.linear import LinearCode

HAMMING_7_4 = [
    [1, 0, 0, 0, 1, 1, 0],
    [0, 1, 0, 0, 1, 0, 1],
    [0, 0, 1, 0, 0, 1, 1],
    [0, 0, 0, 1, 1, 1, 1],
]


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixture for a seeded random generator."""
    return np.random.default_rng(2024)


@pytest.fixture
def hamming_code() -> LinearCode:
    """The binary [7, 4, 3] Hamming code."""
    return LinearCode(np.array(HAMMING_7_4), 2)


@pytest.fixture
def repetition_code() -> LinearCode:
    """The binary [3, 1, 3] repetition code."""
    return LinearCode(np.array([[1, 1, 1]]), 2)


@pytest.fixture
def bsc_single() -> NetworkSpec:
    """One attacked BSC route with N = D = 0.1."""
    return NetworkSpec.identical(1, 1, bsc_route(0.1, 0.1))


@pytest.fixture
def bec_single() -> NetworkSpec:
    """One attacked BEC route with N = D = 0.1."""
    return NetworkSpec.identical(1, 1, bec_route(0.1, 0.1))
