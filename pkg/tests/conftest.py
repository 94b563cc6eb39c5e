from __future__ import annotations

import pytest

_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = dict(report.user_properties).get("criterion")
    if label is not None:
        _acceptance.append((label, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict in sorted(_acceptance, key=lambda item: int(item[0].split(".")[0])):
        terminalreporter.write_line(f"{verdict}  {label}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose the call-phase report so fixtures can see the verdict at teardown
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.rep_call = report
