import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from dfs_certify.graph import build_graph

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def p3():
    return build_graph(3, 2, [(1, 2), (2, 3)])


@pytest.fixture
def ga():
    return build_graph(4, 3, [(1, 2), (1, 3), (2, 4)])


@pytest.fixture
def star5():
    return build_graph(5, 4, [(1, 2), (1, 3), (1, 4), (1, 5)])


@pytest.fixture
def r3():
    return build_graph(3, 2, [(1, 2), (2, 3)], labels=[3, 2, 1])


@pytest.fixture
def chain3_directed():
    return build_graph(3, 1, [(1, 2), (2, 3)], directed=True)
