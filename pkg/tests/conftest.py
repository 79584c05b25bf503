import warnings

import pytest

from qpt_kg.spectrum import ProblemParams

ACCEPTANCE_LINES = []

# mpmath bisection of the closed-form condition at 40 digits
BENCH_E = 0.99587474492805875705


@pytest.fixture
def bench():
    return ProblemParams(m0=1.0, V0=10.0, alpha=1.0, q=1.0)


@pytest.fixture
def attractive():
    """Parameters with a genuine decaying state on the NU (+sqrt(a8)) branch."""
    return ProblemParams(m0=1.0, V0=-0.5, alpha=1.0, q=1.0)


@pytest.fixture(autouse=True)
def _quiet_v0_warning():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="V0 < 0")
        yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
