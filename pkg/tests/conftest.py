"""Shared fixtures: an in-process CLI runner and the acceptance summary."""

import contextlib
import io

import pytest

from themelab import cli


@pytest.fixture
def run_cli():
    """Invoke the CLI entry point in-process; returns (code, stdout, stderr)."""

    def _run(argv):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main(list(argv))
        return code, out.getvalue(), err.getvalue()

    return _run


# one pass/fail line per acceptance criterion, printed after the run
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and name.startswith("test_criterion"):
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome = _ACCEPTANCE[name].upper()
        terminalreporter.write_line(f"{name}: {outcome}")
