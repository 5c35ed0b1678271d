from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from prolong36 import build_example_family, build_model
from prolong36.prolongation import prolong_dual, prolong_fiber_line, prolong_projective, prolong_svc_cone

settings.register_profile(
    "seeds100",
    max_examples=100,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("seeds100")


class Tower:
    """The four prolongations of one (3,6) distribution."""

    def __init__(self, D):
        self.base = D
        self.projective = prolong_projective(D)
        self.fiber_line = prolong_fiber_line(self.projective)
        self.dual = prolong_dual(D)
        self.cone = prolong_svc_cone(self.dual)


@pytest.fixture(scope="session")
def example():
    return build_example_family()


@pytest.fixture(scope="session")
def example_tower(example):
    return Tower(example)


@pytest.fixture(scope="session")
def models():
    return {name: build_model(name) for name in ("F123", "F23", "F13", "F3")}


@pytest.fixture(scope="session")
def model_tower(models):
    return Tower(models["F3"].distribution)


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance_log(request) -> dict:
    return request.config.stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
