import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from horolib.scenarios import solver_run

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def solved():
    """Default schedule runs of the registry maps, computed once per session."""
    return lambda name: solver_run(name)[1]
