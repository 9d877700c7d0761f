import math

import numpy as np
import numpy.testing as npt
import pytest

from olpuc.measure import fourier_table
from olpuc.moments import build, check_quasidefinite, moment_entry, string_residual
from olpuc.ordering import CMV, OrderingSpec, build_upsilon

TWO_PI = 2 * np.pi


def test_entries(leb, expcos, trig):
    assert moment_entry(leb, CMV, 3, 3) == pytest.approx(TWO_PI)
    npt.assert_allclose(moment_entry(expcos, CMV, 0, 2), TWO_PI * 0.5)
    # J(1) = 1, J(2) = -1 so the entry is 2 pi c_-2 = 0
    assert moment_entry(trig, OrderingSpec(2, 1), 1, 2) == 0


def test_build_small(leb, trig, expcos):
    npt.assert_allclose(build(leb, CMV, 5).entries, TWO_PI * np.eye(5))
    npt.assert_allclose(build(trig, CMV, 2).entries, [[TWO_PI, np.pi / 2], [np.pi / 2, TWO_PI]])
    g = build(expcos, CMV, 3).entries
    npt.assert_allclose(g, g.conj().T)
    npt.assert_allclose(np.diag(g), TWO_PI * (math.e + 1))


def test_entries_follow_exponent_difference(ord, cplx):
    from olpuc.measure import fourier_coeff
    from olpuc.ordering import exponents
    g = build(cplx, ord, 10).entries
    e = exponents(ord, 10)
    expect = np.array([[TWO_PI * fourier_coeff(cplx, int(b - a)) for b in e] for a in e])
    npt.assert_allclose(g, expect, rtol=0, atol=1e-15)


def test_quasidefinite(leb, trig):
    minors, ok = check_quasidefinite(build(leb, CMV, 4))
    npt.assert_allclose(minors, [TWO_PI**k for k in range(1, 5)])
    assert ok
    minors, ok = check_quasidefinite(build(trig, CMV, 2))
    npt.assert_allclose(minors[1], 4 * np.pi**2 - np.pi**2 / 4)
    assert ok
    minors, ok = check_quasidefinite(build(fourier_table({0: 1, 1: 1, -1: 1}), CMV, 2))
    assert not ok and minors[1] < 1e-12


@pytest.mark.parametrize("name", ["leb", "expcos", "trig", "cplx"])
def test_string_equation(name, ord, request):
    spec = request.getfixturevalue(name)
    g = build(spec, ord, 12)
    assert string_residual(g, build_upsilon(ord, 12)) < 1e-10 * np.max(np.abs(g.entries))
