import numpy as np
import pytest

from colliq.builders import random_isometric_colligation

_CRITERIA = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        _CRITERIA[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        number = int(name.split("_")[2])
        label = " ".join(name.split("_")[3:])
        verdict = "PASS" if _CRITERIA[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {label}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def iso():
    """Factory for seeded random isometric colligations."""
    def make(dims, seed=0, split=None):
        from colliq.colligation import SpacePartition
        return random_isometric_colligation(SpacePartition(tuple(dims), split), seed)
    return make
