import numpy as np
import pytest

from hordyn.games import congestion_example, rps_example
from hordyn.lti import TransferFunction

X_STAR_CONGESTION = np.array([4, 6, 1]) / 11


@pytest.fixture
def rps():
    return rps_example()


@pytest.fixture
def congestion():
    return congestion_example()


@pytest.fixture
def h_hord():
    return TransferFunction([2, 3], [1, 3, 2])


@pytest.fixture
def g_passive():
    return TransferFunction([2, 3.5, 2], [1, 3, 2, 0])


@pytest.fixture
def g_exrd():
    return TransferFunction([1], [1, 1])


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
