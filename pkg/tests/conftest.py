"""Prints a one-line pass/fail summary per acceptance criterion after the run."""

from __future__ import annotations

import pytest

_results = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.args[0] if marker.args else item.name
    if hasattr(report, "wasxfail"):
        status = "FAIL (expected; see the test's xfail reason)" if report.skipped else "UNEXPECTED PASS"
    elif report.passed:
        status = "PASS"
    elif report.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    _results.append((label, status, report.duration))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, status, duration in sorted(_results):
        terminalreporter.write_line(f"[{status}] {label} ({duration:.2f}s)")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance-criterion test")
