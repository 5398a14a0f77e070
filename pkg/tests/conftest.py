import time
from contextlib import contextmanager

import pytest

ACCEPTANCE_LINES = []


@contextmanager
def criterion(number, title, budget_s):
    """Record one pass/fail line for an acceptance criterion, including its runtime budget."""
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget_s, f"took {elapsed:.3g} s, budget {budget_s} s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append((number, f"[{status}] criterion {number:2d}: {title} ({elapsed:.3g} s)"))


@pytest.fixture
def acceptance():
    return criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
