import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cotype.syntax import parse_session  # noqa: E402

FIXTURES = resources.files("cotype") / "fixtures"

# criterion lines recorded by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def load(name):
    return parse_session((FIXTURES / f"{name}.ct").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def words():
    return load("words")


@pytest.fixture(scope="session")
def omega():
    return load("omega")


@pytest.fixture(scope="session")
def add_session():
    return load("add")


@pytest.fixture(scope="session")
def alt():
    return load("alt")


@pytest.fixture(scope="session")
def dt():
    return load("dt")


@pytest.fixture(scope="session")
def td():
    return load("td")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
