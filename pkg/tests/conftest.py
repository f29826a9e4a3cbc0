import pytest
from hypothesis import HealthCheck, settings

from radialhj import ProblemParams

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def base():
    """The workhorse parameter set p=2, q=1/2, N=2."""
    return ProblemParams(2.0, 0.5, 2)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
