import pytest

from linkrank.graph import WebGraph

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def g1():
    """Two pages linking to page 0: {1->0, 2->0}."""
    return WebGraph.from_edges(3, [(1, 0), (2, 0)])


@pytest.fixture
def two_cycle():
    return WebGraph.from_edges(2, [(0, 1), (1, 0)])


@pytest.fixture
def star_out():
    return WebGraph.from_edges(3, [(0, 1), (0, 2)])


@pytest.fixture
def single():
    return WebGraph.from_edges(1, [])
