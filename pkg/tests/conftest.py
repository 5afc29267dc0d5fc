import os

import pytest
from hypothesis import settings

from cogcap.fading import Nakagami
from cogcap.optimizer import baseline_params, effective_capacity, solve_lambda

# fixed example sets by default; HYPOTHESIS_PROFILE=explore draws fresh ones
settings.register_profile("repeatable", derandomize=True)
settings.register_profile("explore", derandomize=False)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repeatable"))

# lines appended by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def baseline():
    p = baseline_params(M=2)
    pol = solve_lambda(p)
    return p, pol, effective_capacity(pol, p)


@pytest.fixture(scope="session")
def baseline_nakagami():
    p = baseline_params(M=2, model=Nakagami(3))
    pol = solve_lambda(p)
    return p, pol, effective_capacity(pol, p)
