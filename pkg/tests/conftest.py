import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

# nodeid -> [(number, description), outcome]
_CRITERIA = {}
# nodeid -> measured values worth printing next to the verdict
_DETAILS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion n")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _CRITERIA.get(report.nodeid)
    if marker is not None:
        marker[1] = report.outcome


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[item.nodeid] = [(m.args[0], m.args[1]), "not run"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, ((n, text), outcome) in sorted(_CRITERIA.items(), key=lambda kv: kv[1][0][0]):
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        detail = _DETAILS.get(nodeid)
        line = f"criterion {n:2d}: {status}  {text}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def measured(request):
    """Call with a short string to show measured values in the acceptance summary."""
    def note(text):
        _DETAILS[request.node.nodeid] = text
    return note


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
