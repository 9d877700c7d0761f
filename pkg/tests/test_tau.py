import math

import numpy as np
import numpy.testing as npt
import pytest

from olpuc import measure as M, tau as TA, toda as T
from olpuc.errors import IndexOutOfRange, OutsideRegion
from olpuc.measure import DeformationTimes
from olpuc.ordering import CMV, OrderingSpec

ZERO = DeformationTimes()
TWO_PI = 2 * np.pi


@pytest.mark.parametrize("l", range(6))
def test_lebesgue_tau(leb, l):
    npt.assert_allclose(TA.tau(leb, CMV, ZERO, l), TWO_PI**l, rtol=1e-14)


def test_trig_tau(trig):
    npt.assert_allclose(TA.tau(trig, CMV, ZERO, 2), 4 * np.pi**2 * (1 - 1 / 16), rtol=1e-14)


def test_tau_is_pivot_product(expcos, ord):
    t = DeformationTimes.first(0.05)
    gb = T.factors_at_time(expcos, ord, t, 6)
    for l in range(1, 6):
        npt.assert_allclose(TA.tau(expcos, ord, t, l), np.prod(gb.h[:l]), rtol=1e-12)


def test_lebesgue_assoc(leb):
    # deleting column l leaves g^[l]; deleting column l-1 leaves the zero column l
    npt.assert_allclose(TA.tau_assoc(leb, CMV, ZERO, 4, (1, "-", 1)), TWO_PI**4, rtol=1e-14)
    assert TA.tau_assoc(leb, CMV, ZERO, 4, (1, "-", 2)) == 0


def test_trig_assoc_by_hand(trig):
    # rows J = 0, -1 against columns J = 0, 1: [[2pi, pi/2], [pi/2, 0]]
    npt.assert_allclose(TA.tau_assoc(trig, CMV, ZERO, 2, (2, "+", 1)), -np.pi**2 / 4, rtol=1e-14)


def test_poly_residuals(leb, trig, expcos):
    assert TA.tau_poly_residual(leb, CMV, ZERO, 2, 2.0) < 1e-10
    assert TA.tau_poly_residual(trig, CMV, ZERO, 2, 3.0) < 1e-8
    assert TA.tau_poly_residual(expcos, CMV, DeformationTimes.first(0.05), 4, 0.4) < 1e-8


@pytest.mark.parametrize("name", ["trig", "expcos", "cplx"])
def test_poly_representations(name, ord, request, rng):
    spec = request.getfixturevalue(name)
    t = DeformationTimes.first(0.05, 0.03)
    for l in range(ord.n_plus + ord.n_minus, 7):
        z = complex(rng.uniform(0.4, 2.2) * np.exp(2j * np.pi * rng.uniform()))
        reps = TA.poly_representations(spec, ord, t, l, z)
        assert {"phi1", "phi2"} <= set(reps)
        for direct, via_tau in reps.values():
            npt.assert_allclose(via_tau, direct, rtol=1e-8, atol=1e-12)


def test_poly_needs_both_classes(trig):
    with pytest.raises(IndexOutOfRange):
        TA.tau_poly_residual(trig, OrderingSpec(3, 2), ZERO, 3, 1.5)


def test_second_kind_residuals(leb, expcos):
    assert TA.tau_second_kind_residual(leb, CMV, ZERO, 0, 2.0) < 1e-9
    assert TA.tau_second_kind_residual(expcos, CMV, ZERO, 2, 1.5) < 1e-6
    assert TA.tau_second_kind_residual(expcos, OrderingSpec(2, 1), DeformationTimes.first(0.05, 0.02), 3, 0.6) < 1e-6


@pytest.mark.parametrize("dual", [False, True])
@pytest.mark.parametrize("l", [2, 3])
def test_fourier_series_from_tau(expcos, dual, l):
    z = 0.8
    npt.assert_allclose(TA.fourier_tau(expcos, CMV, l, z, dual), math.e + (np.exp(z) + np.exp(1 / z)) / 2,
                        rtol=1e-6)


def test_miwa_shift_helper(trig):
    s = TA.shifted(trig, 0.5, 2, 1)
    npt.assert_allclose(M.fourier_coeff(s, -1), M.fourier_coeff(trig, -1) - 0.5 * M.fourier_coeff(trig, 0))


def test_bilinear(leb, expcos):
    assert TA.bilinear_residual(leb, CMV, ZERO, ZERO, 0, 0, N=1024) < 1e-10
    assert TA.bilinear_residual(expcos, CMV, ZERO, ZERO, 2, 1) < 1e-6
    t, tp = DeformationTimes.first(0.05), DeformationTimes.first(0, 0.03)
    assert TA.bilinear_residual(expcos, CMV, t, tp, 2, 2) < 1e-6


def test_contour_integral():
    npt.assert_allclose(TA.contour_integral(lambda z: 1 / z, 0.7, 64), 1)
    npt.assert_allclose(TA.contour_integral(lambda z: z**3 + 1 / z**2, 1.3, 64), 0, atol=1e-14)


@pytest.mark.parametrize("n,m", [(0, 0), (2, 1), (3, 3)])
def test_wave_bilinear(expcos, ord, n, m):
    t, tp = DeformationTimes.first(0.05), DeformationTimes.first(0, 0.03)
    assert TA.wave_bilinear_residual(expcos, ord, t, tp, n, m) < 1e-6


def test_wave_bilinear_detects_a_wrong_psi2(expcos, monkeypatch):
    orig = T.wave_eval

    def skewed(gb, spec, times, ord, l, z, which):
        v = orig(gb, spec, times, ord, l, z, which)
        return v * (1 + 1e-3 * z) if which == "Psi2" else v

    monkeypatch.setattr(T, "wave_eval", skewed)
    t, tp = DeformationTimes.first(0.05), DeformationTimes.first(0, 0.03)
    assert TA.wave_bilinear_residual(expcos, CMV, t, tp, 2, 1) > 1e-4


def test_bilinear_regions(trig):
    s = M.apply_discrete_factor(trig, 0.5, "D1_backward")
    with pytest.raises(OutsideRegion):
        TA.bilinear_residual(s, CMV, ZERO, ZERO, 1, 1)
    with pytest.raises(OutsideRegion):
        TA.bilinear_residual(trig, CMV, ZERO, ZERO, 1, 1, r0=1.2)
