import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(DATA))


@pytest.fixture
def fixture_csv():
    return DATA / "synthetic_monthly.csv"


@pytest.fixture(params=sorted((DATA / "malformed").glob("*.csv")), ids=lambda p: p.stem)
def malformed_csv(request):
    return request.param


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")
    config._criterion_lines = {}


def pytest_runtest_logreport(report):
    mark = getattr(report, "criterion", None)
    if mark is None or (report.when != "call" and report.passed):
        return
    number, title = mark
    ok, elapsed = report.criterion_lines.get(number, (True, 0.0))[:2]
    report.criterion_lines[number] = (ok and report.passed, elapsed + report.duration, title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)
        report.criterion_lines = item.config._criterion_lines


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_criterion_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            ok, elapsed, title = lines[number]
            terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.1f}s)")
