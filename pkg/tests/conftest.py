import os

import pytest
from hypothesis import HealthCheck, settings

from parhyp import load_example

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def k1n3():
    return load_example("example-k1n3")


@pytest.fixture
def k1n4():
    return load_example("example-k1n4")


@pytest.fixture
def k2n4():
    return load_example("example-k2n4")


@pytest.fixture
def k2n5():
    return load_example("example-k2n5")


@pytest.fixture
def kappa3():
    return load_example("example-kappa3")
