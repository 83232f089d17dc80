import functools
import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from cutproject.fixtures import FIXTURES
from cutproject.scheme import parse_scheme, reduce_cyclic

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def load(name):
    """Parsed fixture, with any cyclic component already removed."""
    s = parse_scheme(FIXTURES[name]())
    return reduce_cyclic(s) if s.cyclic is not None else s


@pytest.fixture(scope="session")
def fib():
    return load("fibonacci")


@pytest.fixture(scope="session")
def ab():
    return load("ammann_beenker")


@pytest.fixture(scope="session")
def liouville():
    return load("liouville")
