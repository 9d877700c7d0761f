import math

import numpy as np
import numpy.testing as npt
import pytest

from olpuc import measure as M, second_kind as SK
from olpuc.errors import OutsideRegion
from olpuc.factorization import gauss_borel, phi
from olpuc.moments import build
from olpuc.ordering import CMV, index_exponent


def F_exp_cos(z):
    return math.e + (np.exp(z) + np.exp(1 / z)) / 2


def test_lebesgue_c2(leb):
    gb = gauss_borel(build(leb, CMV, 4))
    npt.assert_allclose(SK.second_kind(leb, gb, CMV, 0, "C2", 2.0), np.pi, rtol=1e-15)


@pytest.mark.parametrize("l", range(4))
def test_exp_cos_closed_form(expcos, l):
    gb = gauss_borel(build(expcos, CMV, 10))
    z = 1.5 + 0.3j
    npt.assert_allclose(SK.second_kind(expcos, gb, CMV, l, "C1", z),
                        2 * np.pi * phi(gb, CMV, 2, l)(1 / z) / z * F_exp_cos(z), rtol=1e-13)
    npt.assert_allclose(SK.second_kind(expcos, gb, CMV, l, "C2", z),
                        2 * np.pi * phi(gb, CMV, 1, l)(1 / z) / z * F_exp_cos(z), rtol=1e-13)


def test_series_vs_cauchy(expcos):
    gb = gauss_borel(build(expcos, CMV, 8))
    a = SK.second_kind(expcos, gb, CMV, 2, "C21", 1.5, "series")
    b = SK.second_kind(expcos, gb, CMV, 2, "C21", 1.5, "cauchy", 4096)
    npt.assert_allclose(a, b, rtol=1e-8)


@pytest.mark.parametrize("name", ["expcos", "trig", "cplx"])
def test_all_routes_agree(name, ord, request):
    spec = request.getfixturevalue(name)
    gb = gauss_borel(build(spec, ord, 12))
    for l in range(5):
        for which, z in (("C11", 1.7 - 0.4j), ("C21", 1.3j), ("C12", 0.5 + 0.2j), ("C22", -0.6)):
            ref = SK.second_kind(spec, gb, ord, l, which, z)
            for m in ("cauchy", "gamma_det") + (("geronimus",) if l else ()):
                npt.assert_allclose(SK.second_kind(spec, gb, ord, l, which, z, m), ref, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("j", range(5))
def test_gamma_at_level_zero(expcos, j):
    z = 1.7
    expect = 2 * np.pi * z ** (-index_exponent(CMV, j) - 1) * F_exp_cos(1 / z)
    npt.assert_allclose(SK.gamma_eval(expcos, CMV, 0, j, 1, z), expect, rtol=1e-13)


def test_splits(expcos, ord):
    gb = gauss_borel(build(expcos, ord, 10))
    z = 0.8 - 1.1j
    for l in range(5):
        c = {w: SK.second_kind(expcos, gb, ord, l, w, z) for w in ("C1", "C2", "C11", "C12", "C21", "C22")}
        npt.assert_allclose(c["C1"], c["C11"] + c["C12"], rtol=1e-12)
        npt.assert_allclose(c["C2"], c["C21"] + c["C22"], rtol=1e-12)


def test_regions():
    s = M.apply_discrete_factor(M.trig_poly_weight(0.5), 0.5, "D1_backward")
    assert SK.region(s, "C1") == (0.5, math.inf)
    assert SK.region(s, "C22") == (0.0, 2.0)
    gb = gauss_borel(build(s, CMV, 8))
    with pytest.raises(OutsideRegion):
        SK.second_kind(s, gb, CMV, 1, "C11", 0.3)
    with pytest.raises(OutsideRegion):
        SK.second_kind(s, gb, CMV, 1, "C12", 2.0, "cauchy")


def test_evaluate_record(expcos):
    gb = gauss_borel(build(expcos, CMV, 6))
    v = SK.evaluate(expcos, gb, CMV, 1, "C21", 2.0)
    assert (v.which, v.l, v.region) == ("C21", 1, (0.0, math.inf))


def test_summation_targets():
    assert SK.summation_target(1, 2, 1.0, 0.5) == 0
    assert SK.summation_target(1, 1, 2.0, 0.5) == pytest.approx(1 / 1.5)
    assert SK.summation_target(2, 2, 0.5, 2.0) == pytest.approx(1 / 1.5)


def test_summation_converges(expcos):
    gb = gauss_borel(build(expcos, CMV, 30))
    far, near = 1.8 - 0.6j, 0.3 + 0.1j
    errs = [abs(SK.summation_sum(expcos, gb, CMV, L, 1, 1, 1, far, near) - 1 / (far - near)) for L in (4, 8, 12, 16)]
    assert errs[-1] < 1e-6 and all(b < a for a, b in zip(errs, errs[1:]))
    cross = SK.summation_sum(expcos, gb, CMV, 16, 1, 1, 2, far, near)
    assert abs(cross) < 1e-4
