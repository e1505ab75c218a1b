"""Shared test infrastructure.

The acceptance tests register one line per criterion through
`record_criterion`; the summary is printed at the end of the pytest run so
a plain `pytest -v` shows the full pass/fail scoreboard.
"""

from __future__ import annotations

import logging

import pytest

logging.getLogger("mdkit").setLevel(logging.ERROR)

_CRITERIA: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    _CRITERIA.append((name, passed, detail))


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {name}"
        if detail:
            line += f" -- {detail}"
        tr.write_line(line)
