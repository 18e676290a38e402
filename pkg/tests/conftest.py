import sys

import pytest

from ddverify import corpus


@pytest.fixture(scope="session")
def cases():
    return corpus.load()


@pytest.fixture(scope="session")
def by_id(cases):
    return {c.id: c for c in cases}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n, *mod.RESULTS[n]))
