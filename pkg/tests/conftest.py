import numpy as np
import pytest

from firstlink.synthetic import fixture


@pytest.fixture
def fixture_graph():
    graph, table = fixture()
    return graph, table


@pytest.fixture
def ids(fixture_graph):
    _, table = fixture_graph
    return {t: table.lookup(t) for t in "ABCDEFG"}


@pytest.fixture
def rng():
    return np.random.default_rng(20141101)


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the values are echoed in the terminal summary."""

    def record(name: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
