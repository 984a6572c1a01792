import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

QUAD_POINTS = 2**14


def periodic_grid(npts: int = QUAD_POINTS) -> np.ndarray:
    return -math.pi + 2 * math.pi * np.arange(npts) / npts


def quad(values: np.ndarray) -> float:
    """Periodic trapezoid rule over [-pi, pi); spectrally accurate for smooth integrands."""
    return float(2 * math.pi * np.mean(values))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
