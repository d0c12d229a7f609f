import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dopedpc import standard_stack  # noqa: E402

_CRITERIA = []


@pytest.fixture(scope="session")
def stack():
    return standard_stack()


@pytest.fixture
def report():
    """Record one acceptance line, then assert it."""

    def _report(number, name, ok, detail=""):
        line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {name}"
        if detail:
            line += f" ({detail})"
        _CRITERIA.append(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
