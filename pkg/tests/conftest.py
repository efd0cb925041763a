import pytest

from timedgraphs import data_path
from timedgraphs.timed import load_system

_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line: ``report(number, ok, detail)``."""
    def emit(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _LINES.append(line)
        return ok
    return emit


@pytest.fixture(scope="session")
def systems():
    names = ["stack", "queue", "stack_queue_events", "req_grant", "message_preservation",
             "fig2_queue", "fig9_renaming"]
    return {n: load_system(data_path(n + ".json")) for n in names}


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
