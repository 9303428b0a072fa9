import pytest

# criterion number -> [label, passed, measured values]
RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (report.when == "call" or report.failed):
        return
    number, label = marker.args
    entry = RESULTS.setdefault(number, [label, True, []])
    entry[1] = entry[1] and report.passed
    entry[2].extend(f"{k}={v}" for k, v in item.user_properties if k != "runtime")


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(RESULTS):
        label, passed, measured = RESULTS[number]
        status = "PASS" if passed else "FAIL"
        extra = f" ({', '.join(measured)})" if measured else ""
        terminalreporter.write_line(f"criterion {number:2d} {status}: {label}{extra}")
