import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import re

_CRITERIA = {}
_CRITERION_RE = re.compile(r"test_acceptance\.py::test_(criterion_\d+|supplementary_\w+?)(?:_|\[|$)")


def pytest_runtest_logreport(report):
    m = _CRITERION_RE.search(report.nodeid)
    if not m or (report.when != "call" and not report.failed):
        return
    key = m.group(1)
    _CRITERIA[key] = _CRITERIA.get(key, True) and report.passed


def _order(key):
    num = key.split("_")[1]
    return (0, int(num), "") if num.isdigit() else (1, 0, key)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=_order):
        label = key.replace("_", " ")
        terminalreporter.write_line(f"{label}: {'PASS' if _CRITERIA[key] else 'FAIL'}")
