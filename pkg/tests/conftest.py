import re

from hypothesis import HealthCheck, settings

settings.register_profile(
    "catseries",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("catseries")

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_outcomes: dict[int, tuple[str, bool]] = {}

def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    match = _CRITERION.search(report.nodeid)
    if match and "test_acceptance" in report.nodeid:
        number = int(match.group(1))
        title = match.group(2).replace("_", " ")
        _outcomes[number] = (title, report.passed)

def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, passed = _outcomes[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({title})")
