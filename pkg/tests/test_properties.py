import numpy as np
import numpy.testing as npt
from hypothesis import given, settings, strategies as st

from olpuc import cd_kernel, suites
from olpuc.factorization import gauss_borel, verblunsky
from olpuc.laurent import LaurentPoly
from olpuc.measure import fourier_table
from olpuc.moments import build
from olpuc.ordering import OrderingSpec, exponent_index, exponents, index_exponent

cplx = st.builds(complex, st.floats(-1, 1), st.floats(-1, 1))
orderings = st.builds(OrderingSpec, st.integers(1, 4), st.integers(1, 4))


@st.composite
def positive_weights(draw):
    """1 + sum_k (a_k z^k + conj(a_k) z^-k) with sum |a_k| <= 0.45, so the weight is >= 0.1."""
    a = draw(st.lists(cplx, min_size=1, max_size=3))
    s = sum(abs(x) for x in a)
    a = [x * 0.45 / s for x in a] if s > 0.45 else a
    table = {0: 1.0}
    for k, x in enumerate(a, 1):
        table[k], table[-k] = x, np.conj(x)
    return fourier_table(table)


@settings(max_examples=30, deadline=None)
@given(positive_weights(), orderings)
def test_positive_weight_invariants(spec, ord):
    g = build(spec, ord, 10)
    gb = gauss_borel(g)
    npt.assert_allclose(gb.S1 @ g.entries, gb.S2, atol=1e-12)
    npt.assert_allclose(gb.S1inv @ gb.S2, g.entries, atol=1e-12)
    assert np.all(np.abs(gb.h.imag) < 1e-12) and np.all(gb.h.real > 0)
    v = verblunsky(gb, ord)
    assert np.all(np.abs(v.alpha1[1:]) < 1)
    npt.assert_allclose(v.alpha1, v.alpha2, atol=1e-12)
    npt.assert_allclose(v.rho2[1:], 1 - np.abs(v.alpha1[1:]) ** 2, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(positive_weights(), orderings)
def test_biorthogonality_by_quadrature(spec, ord):
    # trig weights times degree-9 polynomials: 256 nodes integrate exactly
    assert suites.biorthogonality(spec, ord, 10, N=256).residual < 1e-12


@settings(max_examples=20, deadline=None)
@given(positive_weights(), orderings, st.integers(2, 7), cplx, cplx)
def test_cd_sum_matches_abc(spec, ord, l, z, zp):
    z, zp = 1.5 * z + 0.2, 1.5 * zp - 0.3j
    g = build(spec, ord, l + 2 * ord.period + 2)
    s = cd_kernel.kernel_sum(gauss_borel(g), ord, l, z, zp)
    a = cd_kernel.kernel_abc(g, ord, l, z, zp)
    assert abs(s - a) <= 1e-10 * max(abs(s), 1.0)


laurent = st.dictionaries(st.integers(-5, 5), cplx, max_size=6).map(LaurentPoly)


@given(laurent, laurent, st.integers(-3, 3), cplx)
def test_laurent_arithmetic(p, q, k, s):
    z = 0.7 + 0.4j
    npt.assert_allclose((p + q)(z), p(z) + q(z), atol=1e-12)
    npt.assert_allclose((p - q)(z), p(z) - q(z), atol=1e-12)
    npt.assert_allclose(p.scale(s)(z), s * p(z), atol=1e-12)
    npt.assert_allclose(p.shift(k)(z), z**k * p(z), atol=1e-11)
    npt.assert_allclose(p.reflect()(z), np.conj(p(1 / np.conj(z))), atol=1e-11)
    assert p.reflect().reflect().distance(p) == 0


@given(orderings, st.integers(0, 200))
def test_exponent_index_inverts(ord, j):
    e = index_exponent(ord, j)
    assert exponent_index(ord, e) == j
    assert exponents(ord, j + 1)[j] == e


@given(orderings, st.integers(1, 60))
def test_exponents_fill_a_window(ord, n):
    e = sorted(exponents(ord, n).tolist())
    assert e == list(range(e[0], e[0] + n))
