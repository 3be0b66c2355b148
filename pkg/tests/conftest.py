import math

import numpy as np
import pytest
from hypothesis import settings

from corecdyn import ConvexCore, DomainShape, ThicknessProfile

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("repro")

SEED = 42


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def unit():
    return ConvexCore.unit_circle()


@pytest.fixture
def fig1(unit):
    return DomainShape(unit, ThicknessProfile.trig(0.5, 0.2, 2))


def trig_shape(d0, eps, m, core=None):
    return DomainShape(core or ConvexCore.unit_circle(), ThicknessProfile.trig(d0, eps, m))


def angdist(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
