import numpy as np
import pytest

from fbshock.gas import GasParams, ThermoState
from fbshock.hugoniot import solve_left_state, theta_minus_for_strength
from fbshock.profile import compute_profile

RIGHT = ThermoState(2.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def air():
    return GasParams(gamma=1.4)


@pytest.fixture(scope="session")
def shock(air):
    """gamma = 1.4 shock of strength d = 0.5 into the state (2, 0, 1)."""
    return solve_left_state(RIGHT, theta_minus_for_strength(RIGHT, 0.5, air), air)


@pytest.fixture(scope="session")
def profile(shock, air):
    return compute_profile(shock, air)


@pytest.fixture(scope="session")
def mono_profile():
    P = GasParams(gamma=5.0 / 3.0)
    return compute_profile(solve_left_state(RIGHT, 1.2, P), P)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
