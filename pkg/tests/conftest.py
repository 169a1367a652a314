import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from untangling.reducing_tri import build_reducing
from untangling.schema import torus_schema

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def tri2():
    return build_reducing(2)


@pytest.fixture(scope="session")
def tri3():
    return build_reducing(3)


@pytest.fixture(scope="session")
def torus():
    return torus_schema().map


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
