"""Shared pytest plumbing for the acceptance suite.

Each acceptance test appends one verdict line to the session log; the lines
are echoed in a terminal section after the run, so they stay visible even
though pytest captures in-test printing.
"""

import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Mutable list of formatted one-line verdicts, one per criterion."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
