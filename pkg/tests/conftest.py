from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from endodga.arith import Context

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

#: filled by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture(scope="session")
def ctx5() -> Context:
    return Context(5)


@pytest.fixture(scope="session")
def ctx7() -> Context:
    return Context(7)


@pytest.fixture(scope="session")
def ctx3() -> Context:
    return Context(3)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=_criterion_order):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def _criterion_order(key: str):
    num, _, rest = key.partition(":")
    return (int(num), rest)
