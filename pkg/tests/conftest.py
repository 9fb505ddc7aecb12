import numpy as np
import pytest

from nsseries import TimeGrid, build_grid, gaussian_initial_data


@pytest.fixture(scope="session")
def grid5():
    """Tiny 5^3 lattice for cheap exact checks."""
    return build_grid(3, 0.5, 1.0)


@pytest.fixture(scope="session")
def grid9():
    """9^3 lattice, the workhorse for mid-size tests."""
    return build_grid(3, 0.5, 2.0)


@pytest.fixture(scope="session")
def u0_small(grid9):
    return gaussian_initial_data(grid9, 0.1, 1.0, {"kind": "constant"})


@pytest.fixture(scope="session")
def tgrid8():
    return TimeGrid.uniform(0.5, 8)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


# one PASS/FAIL line per end-to-end property, filled in by the acceptance
# tests and echoed after the run summary (captured stdout never shows for
# passing tests)
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
