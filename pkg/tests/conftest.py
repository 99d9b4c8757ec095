"""Pytest wiring: echo the acceptance checklist after the run."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None) if module else None
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
