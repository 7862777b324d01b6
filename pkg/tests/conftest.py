import pytest

CRITERION_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): top-level acceptance criterion")


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker:
        CRITERION_RESULTS[marker.args[0]] = call.excinfo is None


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in CRITERION_RESULTS.items():
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}")
