from __future__ import annotations

import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; a test that dies before recording reports FAIL."""
    number = request.node.get_closest_marker("criterion").args[0]
    row = [number, request.node.name, False, "did not finish"]
    request.config.stash[_RESULTS].append(row)

    def record(summary: str, ok: bool, detail: str = "") -> bool:
        row[1:] = [summary, bool(ok), detail]
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_RESULTS, [])
    if not rows:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, summary, ok, detail in sorted(rows, key=lambda r: r[0]):
        tag = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{tag}] criterion {number:>2}: {summary}  ({detail})")
