from __future__ import annotations

import sys

from hypothesis import HealthCheck, settings

settings.register_profile("qdecay", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qdecay")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    report = getattr(mod, "_REPORT", None) if mod else None
    if report is None:
        return
    terminalreporter.section("acceptance criteria")
    for line in report.lines():
        terminalreporter.write_line(line)
