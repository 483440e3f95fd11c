"""Shared fixtures and the acceptance summary printed after the run."""

import math
import time

import pytest

from quasispec.geometry import rectangle, regular_polygon

ACCEPTANCE = {
    1: "FEM reference accuracy (square, 256-gon)",
    2: "Q(2) equals the image area",
    3: "Koebe integrability classification",
    4: "capacity: annulus, Teichmuller bracket, radial continua",
    5: "Ahlfors estimation (square, 512-gon, snowflake)",
    6: "doubling ratio of the radial stretch",
    7: "end-to-end soundness and classical sandwich",
    8: "snowflake bound reproducibility",
    9: "Poincare suite",
    10: "numerical hygiene",
}

SUITE_BUDGET_S = 900.0

_outcomes: dict[int, list[bool]] = {}
_start = time.monotonic()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    n = report.user_properties and dict(report.user_properties).get("criterion")
    if n:
        _outcomes.setdefault(n, []).append(report.passed)


@pytest.fixture(autouse=True)
def _tag_criterion(request, record_property):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        record_property("criterion", marker.args[0])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    elapsed = time.monotonic() - _start
    # part of the hygiene criterion: the whole run stays inside the budget
    _outcomes.setdefault(10, []).append(elapsed < SUITE_BUDGET_S)
    terminalreporter.section("acceptance criteria")
    for n, title in ACCEPTANCE.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2}: {status:<7} {title}")
    terminalreporter.write_line(f"suite wall time {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)")


@pytest.fixture(scope="session")
def unit_square():
    return rectangle()


@pytest.fixture(scope="session")
def disc_256():
    return regular_polygon(256)


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def relerr():
    return rel


@pytest.fixture(scope="session")
def golden():
    return (1 + math.sqrt(5)) / 2
