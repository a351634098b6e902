from __future__ import annotations

import random

import pytest

from catalab import affine_sat

# filled by tests/test_acceptance.py, printed once at the end of the session
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def v16():
    return affine_sat.random_subspace(16, 6, 1)
