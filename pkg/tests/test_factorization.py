import math

import numpy as np
import numpy.testing as npt
import pytest
import scipy.linalg as sl

from olpuc import factorization as F
from olpuc.errors import SingularMinor
from olpuc.factorization import gauss_borel, phi, phi_determinantal, verblunsky
from olpuc.laurent import LaurentPoly
from olpuc.measure import fourier_coeff, fourier_table
from olpuc.moments import build
from olpuc.ordering import CMV, OrderingSpec, index_exponent

TWO_PI = 2 * np.pi

# alpha_1..alpha_6 of e + exp(cos t) cos(sin t), frozen from a Levinson/Toeplitz solve
EXP_COS_ALPHA = [-0.13447071068499755, -0.05005815346455797, -0.007240570879144389,
                 0.0015610829309836293, 0.0010070566893428232, 0.00017136267092593521]


def toeplitz_alpha(spec, l):
    """P_l(0) of the monic Szego polynomial from scipy's Toeplitz solver."""
    c = lambda n: fourier_coeff(spec, n)
    col = [c(i) for i in range(l)]
    row = [c(-i) for i in range(l)]
    return sl.solve_toeplitz((col, row), -np.array([c(j - l) for j in range(l)]))[0]


def test_identity_factors():
    gb = gauss_borel(TWO_PI * np.eye(4))
    npt.assert_array_equal(gb.S1, np.eye(4))
    npt.assert_allclose(gb.S2, TWO_PI * np.eye(4))
    npt.assert_allclose(gb.h, TWO_PI)


def test_trig_pivots(trig):
    gb = gauss_borel(build(trig, CMV, 2))
    npt.assert_allclose(gb.h, [TWO_PI, TWO_PI * (1 - 1 / 16)])


def test_lu_reconstructs(cplx, ord):
    g = build(cplx, ord, 12)
    gb = gauss_borel(g)
    npt.assert_allclose(gb.S1inv @ gb.S2, g.entries, atol=1e-13)
    npt.assert_allclose(np.diag(gb.S1), 1)
    assert np.allclose(np.triu(gb.S1, 1), 0) and np.allclose(np.tril(gb.S2, -1), 0)


def test_singular_minor():
    with pytest.raises(SingularMinor) as exc:
        gauss_borel(build(fourier_table({0: 1, 1: 1, -1: 1}), CMV, 3))
    assert exc.value.level == 2


def test_lebesgue_phi_are_monomials(leb, ord):
    gb = gauss_borel(build(leb, ord, 9))
    for l in range(9):
        assert phi(gb, ord, 1, l).distance(LaurentPoly.monomial(index_exponent(ord, l))) == 0


def test_trig_phi(trig):
    gb = gauss_borel(build(trig, CMV, 4))
    expect = LaurentPoly({-1: 1, 0: -0.25})
    assert phi(gb, CMV, 1, 1).distance(expect) < 1e-15
    assert phi_determinantal(build(trig, CMV, 4), CMV, 1, 1).distance(expect) < 1e-15


def test_exp_cos_phi2_constant(expcos):
    gb = gauss_borel(build(expcos, CMV, 3))
    assert phi(gb, CMV, 2, 0).distance(LaurentPoly({0: 1 / (TWO_PI * (math.e + 1))})) < 1e-17


def test_determinantal(expcos, leb):
    g = build(expcos, CMV, 6)
    gb = gauss_borel(g)
    assert phi_determinantal(g, CMV, 2, 3).distance(phi(gb, CMV, 2, 3)) < 1e-9 * phi(gb, CMV, 2, 3).max_abs()
    assert phi_determinantal(build(leb, CMV, 4), CMV, 1, 2).distance(LaurentPoly.monomial(1)) < 1e-15


def test_verblunsky_lebesgue(leb, ord):
    v = verblunsky(gauss_borel(build(leb, ord, 10)), ord)
    npt.assert_allclose(v.alpha1[1:], 0, atol=1e-15)
    npt.assert_allclose(v.alpha2[1:], 0, atol=1e-15)
    npt.assert_allclose(v.rho2, [0] + [1] * 9)


def test_verblunsky_exp_cos(expcos, ord):
    v = verblunsky(gauss_borel(build(expcos, ord, 8)), ord)
    npt.assert_allclose(v.alpha1[1:7].real, EXP_COS_ALPHA, rtol=1e-12, atol=1e-16)
    npt.assert_allclose(v.alpha1, v.alpha2, atol=1e-15)
    npt.assert_allclose(v.h[1:], v.h[:-1] * v.rho2[1:], rtol=1e-13)


def test_verblunsky_complex_table(cplx, ord):
    v = verblunsky(gauss_borel(build(cplx, ord, 8)), ord)
    npt.assert_allclose(v.alpha1[1:7], [toeplitz_alpha(cplx, l) for l in range(1, 7)], atol=1e-13)
    k = np.arange(1, 8)
    npt.assert_allclose(v.rho2[k], 1 - v.alpha1[k] * np.conj(v.alpha2[k]), atol=1e-14)
    assert np.max(np.abs(v.alpha1[1:] - v.alpha2[1:])) > 1e-3  # the families differ off the positive case


def test_trig_alpha(trig):
    v = verblunsky(gauss_borel(build(trig, CMV, 4)), CMV)
    assert v.alpha1[1] == pytest.approx(-0.25)


def test_szego(leb, trig, expcos):
    gb = gauss_borel(build(leb, CMV, 5))
    npt.assert_allclose(F.szego_from_olp(phi(gb, CMV, 1, 3), CMV, 3), [1, 0, 0, 0])
    npt.assert_allclose(F.szego_oracle(leb, 3), [0, 0, 0, 1])
    npt.assert_allclose(F.szego_oracle(trig, 1), [-0.25, 1])
    gb = gauss_borel(build(trig, CMV, 4))
    npt.assert_allclose(F.szego_from_olp(phi(gb, CMV, 1, 1), CMV, 1), [1, -0.25], atol=1e-15)
    gb = gauss_borel(build(expcos, CMV, 5))
    npt.assert_allclose(F.szego_from_olp(phi(gb, CMV, 1, 2), CMV, 2), F.szego_oracle(expcos, 2), atol=1e-12)


def test_szego_recursion_rebuilds(expcos):
    alpha = np.array([1.0] + EXP_COS_ALPHA)
    p, _ = F.szego_recursion(alpha, 4)
    npt.assert_allclose(p, F.szego_oracle(expcos, 4), atol=1e-13)


def test_reversed_poly():
    npt.assert_allclose(F.reversed_poly(np.array([1, 2j, 3])), [3, -2j, 1])


def test_verblunsky_csv(tmp_path, trig):
    v = verblunsky(gauss_borel(build(trig, CMV, 4)), CMV)
    path = tmp_path / "v.csv"
    v.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("l,re_alpha1")
    assert lines[2].split(",")[1] == "-0.25"
