import os

import pytest

from morsematch.constructions import build_M7_fields, m7_named_cells


def pytest_collection_modifyitems(config, items):
    if os.environ.get("MORSEMATCH_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow cross-check; set MORSEMATCH_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def m7_fields():
    return build_M7_fields()


@pytest.fixture(scope="session")
def star(m7_fields):
    return m7_fields["M_star"]


@pytest.fixture(scope="session")
def names(star):
    return m7_named_cells(star.complex)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_lines():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
