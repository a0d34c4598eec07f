"""Pytest configuration: acceptance-criterion result lines.

Tests marked ``@pytest.mark.acceptance`` each cover one acceptance
criterion, named by the first line of the test docstring. After the run,
one PASS/FAIL line per criterion is printed so the verdict is readable
without scanning the full pytest output.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def _criterion_name(item: pytest.Item) -> str:
    doc = getattr(item.function, "__doc__", None) or ""
    first = doc.strip().splitlines()[0].strip() if doc.strip() else ""
    return first or item.name


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item: pytest.Item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or item.get_closest_marker("acceptance") is None:
        return
    _ACCEPTANCE_RESULTS.append((_criterion_name(item), report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion, passed in _ACCEPTANCE_RESULTS:
        tr.write_line(("PASS: " if passed else "FAIL: ") + criterion)
