import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))  # for the shared oracles module

_criteria = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)$", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        _criteria[n] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    import test_acceptance

    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcome, secs = _criteria[n]
        doc = getattr(test_acceptance, f"test_criterion_{n}").__doc__.strip().splitlines()[0]
        tag = {"passed": "PASS", "skipped": "SKIP"}.get(outcome, "FAIL")
        terminalreporter.write_line(f"{tag} criterion {n} ({secs:.2f}s): {doc}")
