import sys

import pytest

from melonrg import census


@pytest.fixture(scope="session")
def census3():
    return census.generate(3)


@pytest.fixture(scope="session")
def census4():
    return census.generate(4)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
