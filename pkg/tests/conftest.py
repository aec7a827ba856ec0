import numpy as np
import pytest

from pap_attitude.config import normal_config, robust_config
from pap_attitude.sim import run_scenario


@pytest.fixture(scope="session")
def nominal_trace():
    return run_scenario(normal_config())


@pytest.fixture(scope="session")
def robust_trace():
    return run_scenario(robust_config())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
