import numpy as np
import pytest

from olpuc.measure import exp_cos_weight, fourier_table, lebesgue, trig_poly_weight
from olpuc.ordering import OrderingSpec

ORDERINGS = [OrderingSpec(1, 1), OrderingSpec(2, 1), OrderingSpec(3, 2)]

# complex quasi-definite (not positive) table used to separate the alpha families
COMPLEX_TABLE = {0: 1.0, 1: 0.3 + 0.2j, -1: 0.1 - 0.25j, 2: 0.05j}


@pytest.fixture
def leb():
    return lebesgue()


@pytest.fixture
def trig():
    return trig_poly_weight(0.5)


@pytest.fixture
def expcos():
    return exp_cos_weight()


@pytest.fixture
def cplx():
    return fourier_table(COMPLEX_TABLE)


@pytest.fixture(params=ORDERINGS, ids=str)
def ord(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
