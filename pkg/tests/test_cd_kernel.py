import numpy as np
import numpy.testing as npt
import pytest

from olpuc import cd_kernel as CD
from olpuc.factorization import gauss_borel, phi, verblunsky
from olpuc.laurent import LaurentPoly
from olpuc.moments import build
from olpuc.ordering import CMV, OrderingSpec, index_exponent

TWO_PI = 2 * np.pi


def test_lebesgue_kernels(leb):
    g = build(leb, CMV, 6)
    gb = gauss_borel(g)
    assert CD.kernel_sum(gb, CMV, 1, 0.3j, 2.0) == pytest.approx(1 / TWO_PI)
    assert CD.kernel_sum(gb, CMV, 3, 1, 1) == pytest.approx(3 / TWO_PI)
    z, zp = 1.2 - 0.5j, 0.4 + 0.7j
    npt.assert_allclose(CD.kernel_abc(g, CMV, 2, z, zp), (1 + 1 / (np.conj(z) * zp)) / TWO_PI)


def test_trig_abc_by_hand(trig):
    # g = [[2pi, pi/2], [pi/2, 2pi]], chi(2) = (1, 1/2), chi(1/2) = (1, 2)
    npt.assert_allclose(CD.kernel_abc(build(trig, CMV, 2), CMV, 2, 2, 0.5), 2.75 / (3.75 * np.pi))


def test_sum_equals_abc(expcos):
    g = build(expcos, CMV, 10)
    z, zp = 0.7 + 0.1j, 1.3 - 0.2j
    npt.assert_allclose(CD.kernel_sum(gauss_borel(g), CMV, 6, z, zp), CD.kernel_abc(g, CMV, 6, z, zp), rtol=1e-10)
    npt.assert_allclose(CD.kernel_sum(gauss_borel(g), CMV, 6, z, z), CD.kernel_abc(g, CMV, 6, z, z), rtol=1e-10)


@pytest.mark.parametrize("l", [2, 4, 6])
def test_lebesgue_associated(leb, l):
    a = CD.associated(build(leb, CMV, l + 4), CMV, l)
    expect = LaurentPoly.monomial(index_exponent(CMV, l - 1), 1 / TWO_PI)
    assert a.phi1_minus[2].distance(expect) < 1e-17


def test_positive_associated_identity(expcos):
    l = 4
    g = build(expcos, CMV, 10)
    gb = gauss_borel(g)
    v = verblunsky(gb, CMV)
    a = CD.associated(g, CMV, l)
    rhs = phi(gb, CMV, 2, l + 1).scale(gb.h[l + 1]) - phi(gb, CMV, 2, l).scale(gb.h[l] * np.conj(v.alpha1[l + 1]))
    assert a.phi2_plus[2].distance(rhs) < 1e-9


@pytest.mark.parametrize("name", ["expcos", "trig", "cplx"])
def test_methods_agree(name, ord, request):
    spec = request.getfixturevalue(name)
    g = build(spec, ord, 16)
    for l in range(ord.n_plus + 1, 9):
        a, b = CD.associated(g, ord, l), CD.associated(g, ord, l, "determinantal")
        for fam in ("phi1_plus", "phi1_minus", "phi2_plus", "phi2_minus"):
            for k in (1, 2):
                p, q = getattr(a, fam)[k], getattr(b, fam)[k]
                assert p.distance(q) < 1e-9 * max(p.max_abs(), 1.0)


@pytest.mark.parametrize("name", ["expcos", "cplx"])
def test_cd_formula(name, ord, request, rng):
    spec = request.getfixturevalue(name)
    g = build(spec, ord, 16)
    gb = gauss_borel(g)
    for l in (ord.n_plus + 1, 5, 8):
        assoc = CD.associated(g, ord, l)
        for _ in range(5):
            z, zp = (rng.uniform(0.4, 1.8, 2) * np.exp(2j * np.pi * rng.uniform(size=2)))
            if abs(1 - zp * np.conj(z)) < 0.05:
                continue
            s = CD.kernel_sum(gb, ord, l, z, zp)
            npt.assert_allclose(CD.cd_formula(assoc, l, z, zp), s, rtol=1e-9)


def test_lebesgue_cd_formula(leb):
    g = build(leb, CMV, 8)
    npt.assert_allclose(CD.cd_formula(CD.associated(g, CMV, 2), 2, 2, 0.5 + 0.1j),
                        CD.kernel_abc(g, CMV, 2, 2, 0.5 + 0.1j), rtol=1e-12)


def test_projection(leb):
    gb = gauss_borel(build(leb, CMV, 6))
    assert CD.project(leb, gb, CMV, 3, LaurentPoly({2: 1})).max_abs() == 0
    # (3,1) opens with 1, z, z^2; under dtheta z^3 is orthogonal to all three
    o = OrderingSpec(3, 1)
    pf = CD.project(leb, gauss_borel(build(leb, o, 8)), o, 3, LaurentPoly({2: 1, 3: 1}))
    assert pf.distance(LaurentPoly({2: 1})) < 1e-15


def test_projection_fixes_window(expcos, rng):
    for p, q in [(1, 0), (1, 2), (2, 3)]:
        o = OrderingSpec(q + 1, p)
        l = p + q + 1
        gb = gauss_borel(build(expcos, o, l + 6))
        f = LaurentPoly({e: complex(*rng.normal(size=2)) for e in range(-p, q + 1)})
        assert CD.project(expcos, gb, o, l, f).distance(f) < 1e-10
