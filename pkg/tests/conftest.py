import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nonspreading import EuclideanSpace, HyperbolicSpace, TreeSpace
from nonspreading.instances import BRANCHED_TREE

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def star():
    return TreeSpace.star(3)


@pytest.fixture
def branched():
    return TreeSpace.from_json(BRANCHED_TREE)


def all_spaces():
    return [EuclideanSpace(2), EuclideanSpace(5), HyperbolicSpace(2), HyperbolicSpace(3),
            TreeSpace.star(3), TreeSpace.from_json(BRANCHED_TREE)]


def sample(space, rng, k, radius=3.0):
    center = None if space.tag.value == "tree" else space.origin()
    r = None if space.tag.value == "tree" else radius
    return [space.random_point(rng, center, r) for _ in range(k)]


SPACE_IDS = ["E2", "E5", "H2", "H3", "star", "branched"]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
