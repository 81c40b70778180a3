"""Shared fixtures and the per-criterion pass/fail summary."""

import numpy as np
import pytest

_criteria: dict[str, tuple[int, str]] = {}
_outcomes: dict[int, list[bool]] = {}


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criteria[item.nodeid] = (int(mark.args[0]), str(mark.args[1]))


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or report.failed:
        number, _ = _criteria[report.nodeid]
        _outcomes.setdefault(number, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    titles = {n: t for n, t in _criteria.values()}
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        status = "PASS" if all(_outcomes[number]) else "FAIL"
        terminalreporter.write_line(f"AC{number} {status} {titles[number]}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
