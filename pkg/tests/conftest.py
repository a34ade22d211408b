import numpy as np
import pytest

from irs_d2d import SystemConfig


@pytest.fixture
def config():
    """Default two-helper scenario (helper 2 blocked, N=32)."""
    return SystemConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
