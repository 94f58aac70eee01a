"""Shared fixtures: small codes are expensive enough to build once per session."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from dwcode import make_code

settings.register_profile("dwcode", deadline=None, max_examples=60)
settings.load_profile("dwcode")


@pytest.fixture(scope="session")
def css3():
    return make_code("css", d=3)


@pytest.fixture(scope="session")
def css5():
    return make_code("css", d=5)


@pytest.fixture(scope="session")
def x3z3_3():
    return make_code("x3z3", d=3)


@pytest.fixture(scope="session")
def x3z3_5():
    return make_code("x3z3", d=5)


@pytest.fixture(scope="session")
def x3z3_l6():
    return make_code("x3z3-periodic", L=6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


#: (criterion, verdict, detail) lines collected by the acceptance tests.
ACCEPTANCE: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:>2}: {verdict}  {detail}")
