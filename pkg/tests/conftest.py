import numpy as np
import pytest

from gamow import PotentialParams


@pytest.fixture
def p30():
    return PotentialParams(2.0, 30.0)


@pytest.fixture
def p100():
    return PotentialParams(2.0, 100.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
