import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from maxharm import Grid

settings.register_profile(
    "maxharm", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("maxharm")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def torus64():
    return Grid.unit_torus(64)


@pytest.fixture
def box64():
    return Grid.unit_box(64)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
