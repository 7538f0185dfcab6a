import pytest

from latrigid import corpus, fixtures
from latrigid.lattice_core import Configuration

import _acc


@pytest.fixture(scope="session")
def corpus11():
    return [Configuration(s) for s in corpus.exhaustive(11)]


@pytest.fixture(scope="session")
def fixture_configs():
    return {name: fixtures.load(name) for name in fixtures.names()}


@pytest.fixture(scope="session")
def fixture_verdicts(fixture_configs):
    from latrigid.shear import verdict

    return {name: verdict(c) for name, c in fixture_configs.items()}


def pytest_terminal_summary(terminalreporter):
    if not _acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_acc.RESULTS):
        terminalreporter.write_line(_acc.RESULTS[k])
