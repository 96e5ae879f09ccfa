from __future__ import annotations

import sys

import pytest

from bcl.solvers import SolverConfig


@pytest.fixture
def fast():
    """A light solver configuration for unit tests (acceptance runs use the defaults)."""
    return SolverConfig(restarts=8, max_iters=400)


ACCEPTANCE_SECONDS = [0.0]


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid:
        ACCEPTANCE_SECONDS[0] += report.duration


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
        terminalreporter.write_line(f"acceptance runtime: {ACCEPTANCE_SECONDS[0] / 60:.1f} min (budget 15 min)")
