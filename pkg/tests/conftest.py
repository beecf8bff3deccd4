"""Collects acceptance-criterion verdicts and prints them after the run."""
from __future__ import annotations

import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record_criterion():
    """Call with (number, title, passed, detail) to register a verdict."""
    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE[number] = (title, passed, detail)
        print(f"CRITERION {number} {'PASS' if passed else 'FAIL'}: {title} {detail}".rstrip())
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'} [{number}] {title}" + (f" ({detail})" if detail else ""))
