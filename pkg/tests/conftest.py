import math

import pytest
from hypothesis import HealthCheck, settings

from oscillab import FcglParams, ModelParams

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def fcgl_params():
    """Reference amplitude-equation parameters used throughout."""
    return FcglParams(mu=-0.5, nu=2.0, alpha=1.0, beta=-2.0,
                      c_re=-1.0, c_im=-2.5, gamma=1.496)


@pytest.fixture
def weak_model():
    """Forced-model parameters at epsilon=0.1 (weak damping)."""
    return ModelParams(mu=-0.005, omega=1.02, alpha=1.0, beta=-2.0,
                       c_re=-1.0, c_im=-2.5, f=0.058)


@pytest.fixture
def strong_model():
    """Forced-model parameters at epsilon=0.5 (strong damping)."""
    return ModelParams(mu=-0.125, omega=1.5, alpha=1.0, beta=-2.0,
                       c_re=-1.0, c_im=-2.5, f=2.30)


TWO_PI = 2.0 * math.pi
