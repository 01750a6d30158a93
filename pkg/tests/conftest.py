from fractions import Fraction

import numpy as np
import pytest

# 4x4 block companion matrix [[B, C], [I, O]] used throughout as the main regression case
COMPANION4 = [
    [-1, -1, -1, Fraction(-4, 5)],
    [-4, -5, -4, -4],
    [1, 0, 0, 0],
    [0, 1, 0, 0],
]

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line('markers', 'criterion(number, title): acceptance criterion')


@pytest.fixture
def companion4():
    out = np.empty((4, 4), dtype=object)
    for i, row in enumerate(COMPANION4):
        for j, x in enumerate(row):
            out[i, j] = Fraction(x)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_runtest_logreport(report):
    if report.when != 'call' and not (report.when == 'setup' and report.failed):
        return
    marker = _acceptance.get(report.nodeid)
    if marker is not None:
        marker['passed'] = report.passed


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker('criterion')
        if m is not None:
            _acceptance[item.nodeid] = {'number': m.args[0], 'title': m.args[1], 'passed': None}


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section('acceptance criteria')
    for entry in sorted(_acceptance.values(), key=lambda e: e['number']):
        if entry['passed'] is None:
            state = 'NOT RUN'
        else:
            state = 'PASS' if entry['passed'] else 'FAIL'
        terminalreporter.write_line(f"criterion {entry['number']:>2}: {state}  {entry['title']}")
