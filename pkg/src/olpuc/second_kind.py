"""Second kind functions C_{a,b}^(l), C_a^(l) and the Gamma series behind them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutsideRegion, QuadratureNearCircle
from .factorization import GaussBorelFactors, phi, phi_matrix
from .measure import DEFAULT_QUAD_N, MeasureSpec, coeff_array, density, quad_nodes
from .moments import moment_block
from .ordering import OrderingSpec, chi, class_of, index_exponent, nu_minus, nu_plus

WHICH = ("C11", "C12", "C21", "C22", "C1", "C2")
SERIES_N = 200


@dataclass(frozen=True)
class SecondKindValue:
    which: str
    l: int
    z: complex
    value: complex
    region: tuple[float, float]


def _coeffs(spec: MeasureSpec, width: int):
    """c_n for |n| <= width as a lookup; indices past a decorated bound read as zero."""
    w = width
    if spec.kind == "decorated" and w > spec.bound:
        w = spec.bound
    c = coeff_array(spec, w)

    def get(n):
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        ok = np.abs(n) <= w
        out[ok] = c[n[ok] + w]
        return out

    return get


def region(spec: MeasureSpec, which: str, method: str = "series") -> tuple[float, float]:
    """Open annulus (inner, outer) of validity for a method."""
    lo, hi = spec.annulus()  # (R-, R+)
    inv = lambda r: math.inf if r == 0 else (0.0 if r == math.inf else 1 / r)
    if method in ("cauchy", "geronimus"):
        if which in ("C11", "C21"):
            return (1.0, math.inf)
        if which in ("C12", "C22"):
            return (0.0, 1.0)
        return (1.0, 1.0)  # empty: no single Cauchy integral
    return {
        "C11": (lo, math.inf),
        "C12": (0.0, hi),
        "C21": (inv(hi), math.inf),
        "C22": (0.0, inv(lo)),
        "C1": (lo, hi),
        "C2": (inv(hi), inv(lo)),
    }[which]


def _check_region(spec, which, method, z):
    a, b = region(spec, which, method)
    r = abs(z)
    if not (a < r < b) or z == 0:
        raise OutsideRegion(f"{which} by {method} needs {a} < |z| < {b}, got {r}")


def _series(spec, gb, ord, l, which, z, N):
    fam = 2 if which.startswith("C1") else 1
    p = phi(gb, ord, fam, l)
    ks = np.array(sorted(p.coeffs), dtype=int)
    pk = np.array([p.coeffs[k] for k in ks])
    if which in ("C1", "C2"):
        # closed forms: 2 pi phi(1/z) z^-1 F(z) (conj coefficients) or F(1/z)
        c = _coeffs(spec, N)
        n = np.arange(-N, N + 1)
        if which == "C1":
            f = np.sum(np.conj(c(n)) * z ** n.astype(float))
        else:
            f = np.sum(c(n) * z ** (-n.astype(float)))
        return 2 * np.pi * p(1 / z) / z * f
    n = np.arange(N)
    c = _coeffs(spec, N + int(np.max(np.abs(ks))) + 1)
    total = 0j
    for k, a in zip(ks, pk):
        if which == "C11":
            s = np.sum(np.conj(c(k - n)) * z ** (-n - 1.0))
        elif which == "C12":
            s = np.sum(np.conj(c(k + n + 1)) * z ** n.astype(float))
        elif which == "C21":
            s = np.sum(c(n - k) * z ** (-n - 1.0))
        else:
            s = np.sum(c(-k - n - 1) * z ** n.astype(float))
        total += a * s
    return 2 * np.pi * total


def _circle_integral(spec: MeasureSpec, f, N: int, conj: bool) -> complex:
    """int f(u) dmu or int f(u) conj(dmu) by the trapezoid rule."""
    u = quad_nodes(N)
    w = density(spec, u)
    if conj:
        w = np.conj(w)
    return complex(np.sum(f(u) * w) * 2 * np.pi / N)


def _cauchy(spec, gb, ord, l, which, z, N, geronimus=False):
    if 0.95 < abs(z) < 1.05:
        raise QuadratureNearCircle(f"|z|={abs(z)}")
    fam = 2 if which.startswith("C1") else 1
    p = phi(gb, ord, fam, l)
    sign = 1 if which.endswith("1") else -1
    zi = 1 / z
    if geronimus:
        # same value for l >= 1, where phi integrates to zero against dmu
        kern = lambda u: (u + zi) / (u - zi) * p(u) / (2 * z)
    else:
        kern = lambda u: zi * u * p(u) / (u - zi)
    return sign * _circle_integral(spec, kern, N, fam == 2)


def gamma_eval(spec: MeasureSpec, ord: OrderingSpec, l: int, j: int, side: int, z: complex,
               N: int = SERIES_N, part: int | None = None) -> complex:
    """Gamma_{side,j}^(l)(z) = sum_{k>=l} g_jk chi*^(k) (side 1) or g^dagger_jk chi*^(k) (side 2).

    Summed through the Fourier coefficients: the indices k >= l miss exactly the
    exponents -nu_-(l-1) .. nu_+(l-1)-1.  ``part`` keeps only class-1 (1) or
    class-2 (2) indices k.
    """
    lo, hi = spec.annulus()
    r = abs(z)
    if side == 1:
        ok = (hi == math.inf or r > 1 / hi) and (lo == 0 or r < 1 / lo)
    else:
        ok = lo < r < hi
    if z == 0 or not ok:
        raise OutsideRegion(f"Gamma side {side} at |z|={r}")
    Jj = index_exponent(ord, j)
    top = nu_plus(ord, l - 1) if l > 0 else 0
    bot = -nu_minus(ord, l - 1) if l > 0 else 0
    m_pos = np.arange(top, top + N)  # kept nonnegative exponents m = J(k)
    m_neg = np.arange(bot - 1, bot - 1 - N, -1)  # kept negative exponents
    ms = {1: m_pos, 2: m_neg, None: np.concatenate([m_pos, m_neg])}[part]
    c = _coeffs(spec, N + abs(Jj) + abs(top) + abs(bot) + 1)
    if side == 1:
        vals = c(ms - Jj)
    else:
        vals = np.conj(c(Jj - ms))
    return complex(2 * np.pi * np.sum(vals * z ** (-ms - 1.0)))


def _gamma_det(spec, gb, ord, l, which, z, N):
    part = None if which in ("C1", "C2") else int(which[2])
    if which.startswith("C2"):
        g = moment_block(spec, ord, l + 1, l)
        col = np.array([gamma_eval(spec, ord, l, j, 1, z, N, part) for j in range(l + 1)])
        num = np.linalg.det(np.hstack([g, col[:, None]]))
        den = np.linalg.det(g[:l, :l]) if l else 1.0
        return num / den
    g = moment_block(spec, ord, l, l + 1)
    row = np.conj([gamma_eval(spec, ord, l, j, 2, z, N, part) for j in range(l + 1)])
    num = np.linalg.det(np.vstack([g, row[None, :]]))
    den = np.linalg.det(moment_block(spec, ord, l + 1))
    return np.conj(num / den)


def second_kind(spec: MeasureSpec, gb: GaussBorelFactors, ord: OrderingSpec, l: int, which: str,
                z: complex, method: str = "series", N: int | None = None) -> complex:
    """Value of a second kind function by one of three independent routes."""
    if which not in WHICH:
        raise ValueError(which)
    z = complex(z)
    if method == "series":
        _check_region(spec, which, method, z)
        return complex(_series(spec, gb, ord, l, which, z, N or SERIES_N))
    if method in ("cauchy", "geronimus"):
        if which in ("C1", "C2"):
            raise OutsideRegion("the Cauchy form exists only for the partial functions")
        _check_region(spec, which, method, z)
        return complex(_cauchy(spec, gb, ord, l, which, z, N or DEFAULT_QUAD_N, method == "geronimus"))
    if method == "gamma_det":
        _check_region(spec, which, "series", z)
        return complex(_gamma_det(spec, gb, ord, l, which, z, N or SERIES_N))
    raise ValueError(method)


def evaluate(spec, gb, ord, l, which, z, method="series", N=None) -> SecondKindValue:
    v = second_kind(spec, gb, ord, l, which, z, method, N)
    return SecondKindValue(which, l, complex(z), v, region(spec, which, method))


def partial_phi(gb: GaussBorelFactors, ord: OrderingSpec, family: int, part: int, z: complex, L: int) -> np.ndarray:
    """phi_{family,part}^(l)(z) for l < L: the polynomials with only class-``part`` monomials kept."""
    x = chi(ord, L, z)
    mask = np.array([class_of(ord, k) == part for k in range(L)])
    return phi_matrix(gb, family)[:L, :L] @ np.where(mask, x, 0)


def summation_sum(spec: MeasureSpec, gb: GaussBorelFactors, ord: OrderingSpec, L: int, family: int,
                  c_part: int, p_part: int, z: complex, zp: complex, N: int | None = None) -> complex:
    """sum_{l<L} conj(C_{family,c_part}^(l)(conj z)) phi_{family,p_part}^(l)(z')."""
    which = f"C{family}{c_part}"
    c = np.array([second_kind(spec, gb, ord, l, which, np.conj(z), "series", N) for l in range(L)])
    return complex(np.sum(np.conj(c) * partial_phi(gb, ord, family, p_part, zp, L)))


def summation_target(c_part: int, p_part: int, z: complex, zp: complex) -> complex:
    """Limit of ``summation_sum``; the diagonal sums need |z'| < |z| (part 1) or |z'| > |z| (part 2)."""
    if c_part != p_part:
        return 0j
    return 1 / (z - zp) if c_part == 1 else -1 / (z - zp)
