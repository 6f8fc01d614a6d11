import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion checked by this test"
    )


_outcomes: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        report.criterion_name = marker.args[0]


def pytest_runtest_logreport(report):
    name = getattr(report, "criterion_name", None)
    if name is None:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        if report.passed:
            status = "PASS"
        elif report.skipped:
            status = "SKIP"
        else:
            status = "FAIL"
        _outcomes.append((name, status))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, status in _outcomes:
        terminalreporter.write_line(f"[{status}] {name}")
