import json
from importlib import resources

import pytest

from kgraph import fixture


def raw(name):
    return json.loads(resources.files("kgraph").joinpath("fixtures", f"{name}.json").read_text())


@pytest.fixture(scope="session")
def t2():
    return fixture("t2")


@pytest.fixture(scope="session")
def tt2():
    return fixture("tt2")


@pytest.fixture(scope="session")
def tt3():
    return fixture("tt3")


@pytest.fixture(scope="session")
def omega22():
    return fixture("omega22")


@pytest.fixture(scope="session")
def two_loop():
    return fixture("two_loop")


CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
