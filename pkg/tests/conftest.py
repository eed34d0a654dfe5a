import random

import pytest

from qhecke.cartan import PRESETS, make_scalars
from qhecke.diagcalc import Calculus


@pytest.fixture
def a1():
    return PRESETS["A1"]


@pytest.fixture
def a2():
    return PRESETS["A2"]


@pytest.fixture
def a2_q(a2):
    return make_scalars(a2, t={("1", "2"): 2, ("2", "1"): 3})


@pytest.fixture
def calc_a1(a1):
    return Calculus(a1)


@pytest.fixture
def rng():
    return random.Random(12345)


# ---------------------------------------------------------------- acceptance report

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
