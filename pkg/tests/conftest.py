from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from trqftc.allocation import RotorGeometry
from trqftc.vehicle import DEFAULT_PARAMS

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

# lines reported by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def params():
    return DEFAULT_PARAMS


@pytest.fixture
def geometry():
    return RotorGeometry.x_config(DEFAULT_PARAMS.arm_length)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
