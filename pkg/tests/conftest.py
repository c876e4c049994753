import os

import pytest
from hypothesis import HealthCheck, settings

from sadic.io import load_fixture

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def tm():
    return load_fixture("thue_morse")


@pytest.fixture(scope="session")
def fib():
    return load_fixture("fibonacci")


@pytest.fixture(scope="session")
def leaf():
    return load_fixture("periodic_leaf")


@pytest.fixture(scope="session")
def bkms():
    return load_fixture("bkms")
