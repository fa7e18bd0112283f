from __future__ import annotations

import pytest

# PASS/FAIL lines recorded by the acceptance tests, echoed in the terminal summary
ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line, then fail the test if the criterion does not hold."""

    def record(num: int, label: str, ok: bool, detail: str, elapsed: float, budget: float):
        ok = bool(ok) and elapsed < budget
        line = f"{'PASS' if ok else 'FAIL'} criterion {num:>2} {label}: {detail} [{elapsed:.2f}s of {budget:g}s]"
        ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
