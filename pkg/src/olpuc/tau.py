"""tau-functions: determinants of deformed moment truncations and the identities they satisfy.

Miwa-shifted tau values are obtained by decorating the measure with the
rational factor of the shift and taking the determinant again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cd_kernel
from .errors import IndexOutOfRange, OutsideRegion, SingularMinor
from .factorization import gauss_borel, phi
from .measure import DeformationTimes, MeasureSpec, coeff_array, deform, miwa_shift
from .moments import build, moment_block
from .ordering import OrderingSpec, class_of, l_assoc, nu_minus, nu_plus
from .second_kind import second_kind


@dataclass(frozen=True)
class TauValue:
    label: tuple  # ("main",) or ("assoc", family, sign, a)
    l: int
    times: DeformationTimes
    value: complex


def _det(a: np.ndarray) -> complex:
    return complex(np.linalg.det(a)) if a.size else 1.0 + 0j


def shifted(spec: MeasureSpec, w: complex, family: int, sign: int) -> MeasureSpec:
    """The measure at t + sign [w]_family.

    [w]_1 shifts t1j by w^j/j and multiplies the weight by (1 - w z)^(-sign);
    [w]_2 shifts t2j and multiplies by (1 - w/z)^sign.  Inverse factors whose
    circle expansion diverges are continued analytically.
    """
    w = complex(w)
    if family == 1:
        if sign > 0:
            return miwa_shift(spec, 1 / w, "1+", continued=abs(w) >= 1)
        return miwa_shift(spec, 1 / w, "1-")
    if sign > 0:
        return miwa_shift(spec, w, "2+")
    return miwa_shift(spec, w, "2-", continued=abs(w) >= 1)


def _tau_of(spec: MeasureSpec, ord: OrderingSpec, l: int) -> complex:
    return _det(moment_block(spec, ord, l)) if l else 1.0 + 0j


def _hadamard(block: np.ndarray) -> float:
    """Product of row norms: bounds |det| and sets its rounding scale."""
    return float(np.prod(np.linalg.norm(block, axis=1))) if block.size else 1.0


def _assoc_of(spec: MeasureSpec, ord: OrderingSpec, l: int, family: int, sign: str, a: int,
              with_scale: bool = False):
    if sign == "-":
        t = l_assoc(ord, l, a, "minus")
        G = moment_block(spec, ord, l + 1)
        if family == 1:
            block = np.delete(G[:l, :], t, axis=1)
        else:
            block = np.delete(G[:, :l], t, axis=0)
        val = (-1) ** (l + t) * _det(block)
        return (val, _hadamard(block)) if with_scale else val
    if l < 1:
        raise IndexOutOfRange("associated tau with a replaced line needs l >= 1")
    t = l_assoc(ord, l - 1, a, "plus")
    G = moment_block(spec, ord, t + 1)
    keep = list(range(l - 1)) + [t]
    block = G[keep, :l] if family == 1 else G[:l, keep]
    return (_det(block), _hadamard(block)) if with_scale else _det(block)


def tau(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int) -> complex:
    """det g^[l](t), with tau^(0) = 1."""
    return _tau_of(deform(spec, times), ord, l)


def tau_assoc(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int, label: tuple) -> complex:
    """Associated tau-function, ``label = (family, sign, a)`` with sign '+' or '-'.

    '-' deletes column (family 1) or row (family 2) l_{-a} from the l x (l+1)
    (or (l+1) x l) block and carries the sign (-1)^(l + l_{-a}); '+' replaces
    the last row (family 1) or column (family 2) of g^[l] by line (l-1)_{+a}.
    """
    family, sign, a = label
    try:
        return _assoc_of(deform(spec, times), ord, l, family, sign, a)
    except np.linalg.LinAlgError as exc:
        raise SingularMinor(l) from exc


def _rel(x: complex, y: complex, scale: float = 0.0) -> float:
    s = max(abs(x), abs(y), scale)
    return abs(x - y) / s if s > 1e-300 else 0.0


def poly_representations(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int, z: complex) -> dict:
    """Pairs (direct value, tau quotient) for every polynomial identity at level l.

    Keys name the polynomial: ``phi1``, ``phi1+b``, ``phi1-b`` (b the other
    class) and the conjugated duals ``phi2``, ``phi2+b``, ``phi2-b``.
    """
    z = complex(z)
    if z == 0:
        raise OutsideRegion("z = 0")
    sp = deform(spec, times)
    g = build(sp, ord, l_assoc(ord, l, 3 - class_of(ord, l), "plus") + 2)
    gb = gauss_borel(g)
    a = class_of(ord, l)
    b = 3 - a
    lb = l_assoc(ord, l, b, "plus")
    t_l, t_l1 = _tau_of(sp, ord, l), _tau_of(sp, ord, l + 1)
    zb = np.conj(z)
    # the two shifts that lower (class 1) or raise (class 2) the leading exponent
    down, up = shifted(sp, 1 / z, 1, -1), shifted(sp, z, 2, 1)
    down_c, up_c = shifted(sp, 1 / zb, 2, 1), shifted(sp, zb, 1, -1)
    if a == 1:
        pre, pre_b = z ** (nu_plus(ord, l) - 1), z ** (-nu_minus(ord, lb))
        main, other = down, up
        cpre, cpre_b = zb ** (nu_plus(ord, l) - 1), zb ** (-nu_minus(ord, lb))
        cmain, cother = down_c, up_c
    else:
        pre, pre_b = z ** (-nu_minus(ord, l)), z ** (nu_plus(ord, lb) - 1)
        main, other = up, down
        cpre, cpre_b = zb ** (-nu_minus(ord, l)), zb ** (nu_plus(ord, lb) - 1)
        cmain, cother = up_c, down_c
    out = {
        "phi1": (phi(gb, ord, 1, l)(z), pre * _tau_of(main, ord, l) / t_l),
        f"phi1+{b}": (cd_kernel._plus_linear(g, ord, l, b, 1)(z), pre_b * _tau_of(other, ord, l) / t_l),
        f"phi1-{b}": (cd_kernel._minus_linear(g, ord, l, b, 1)(z),
                      pre * _assoc_of(main, ord, l, 1, "-", b) / t_l1),
        "phi2": (np.conj(phi(gb, ord, 2, l)(z)), cpre * _tau_of(cmain, ord, l) / t_l1),
        f"phi2+{b}": (np.conj(cd_kernel._plus_linear(g, ord, l, b, 2)(z)), cpre_b * _tau_of(cother, ord, l) / t_l),
        f"phi2-{b}": (np.conj(cd_kernel._minus_linear(g, ord, l, b, 2)(z)),
                      cpre * _assoc_of(cmain, ord, l, 2, "-", b) / t_l1),
    }
    return {k: (complex(x), complex(y)) for k, (x, y) in out.items()}


def tau_poly_residual(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int, z: complex) -> float:
    """Largest relative mismatch over the main, dual and associated tau representations."""
    if l < ord.n_plus + ord.n_minus:
        raise IndexOutOfRange(f"l={l} below n+ + n- = {ord.n_plus + ord.n_minus}")
    reps = poly_representations(spec, ord, times, l, z)
    return max(_rel(x, y) for x, y in reps.values())


def second_kind_representations(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int,
                                z: complex) -> dict:
    """Triples (series value, tau quotient, rounding scale) for the functions valid at z.

    The partial functions C_{a,1} need |z| > 1 and C_{a,2} need |z| < 1 for the
    circle expansion of the Miwa factor; the full C_1, C_2 and the Fourier
    series use analytically continued factors inside their annulus.
    """
    z = complex(z)
    if z == 0:
        raise OutsideRegion("z = 0")
    sp = deform(spec, times)
    lp1, lp2 = l_assoc(ord, l, 1, "plus"), l_assoc(ord, l, 2, "plus")
    gb = gauss_borel(build(sp, ord, max(lp1, lp2) + 2))
    t_l, t_l1 = _tau_of(sp, ord, l), _tau_of(sp, ord, l + 1)
    e1, e2 = nu_plus(ord, lp1), nu_minus(ord, lp2)
    zb = np.conj(z)
    lo, hi = sp.annulus()
    out = {}

    # each tau quotient comes with the rounding scale of its minor, since
    # several of these functions are nearly zero for measures close to Lebesgue
    def quotient(pre, minor, den):
        val, scale = minor
        return pre * val / den, abs(pre) * scale / abs(den)

    def c21(x):
        return quotient(x ** (-e1), _assoc_of(shifted(sp, 1 / x, 2, -1), ord, l + 1, 2, "+", 1, True), t_l)

    def c22(x):
        return quotient(x ** (e2 - 1), _assoc_of(shifted(sp, x, 1, 1), ord, l + 1, 2, "+", 2, True), t_l)

    def c11(x):  # conj(C11(x))
        xb = np.conj(x)
        return quotient(xb ** (-e1), _assoc_of(shifted(sp, 1 / xb, 1, 1), ord, l + 1, 1, "+", 1, True), t_l1)

    def c12(x):
        xb = np.conj(x)
        return quotient(xb ** (e2 - 1), _assoc_of(shifted(sp, xb, 2, -1), ord, l + 1, 1, "+", 2, True), t_l1)

    def add(p, q):
        return p[0] + q[0], p[1] + q[1]

    r = abs(z)
    if r > 1:
        out["C21"] = (second_kind(sp, gb, ord, l, "C21", z), *c21(z))
        out["C11"] = (np.conj(second_kind(sp, gb, ord, l, "C11", z)), *c11(z))
    if r < 1:
        out["C22"] = (second_kind(sp, gb, ord, l, "C22", z), *c22(z))
        out["C12"] = (np.conj(second_kind(sp, gb, ord, l, "C12", z)), *c12(z))
    inv = lambda x: math.inf if x == 0 else 1 / x
    if inv(hi) < r < inv(lo):
        out["C2"] = (second_kind(sp, gb, ord, l, "C2", z), *add(c21(z), c22(z)))
    if lo < r < hi:
        out["C1"] = (np.conj(second_kind(sp, gb, ord, l, "C1", z)), *add(c11(z), c12(z)))
        out["F"] = (_fourier(sp, z), fourier_tau(sp, ord, l, z), 0.0)
        out["F_dual"] = (out["F"][0], fourier_tau(sp, ord, l, z, dual=True), 0.0)
    return {k: (complex(x), complex(y), float(s)) for k, (x, y, s) in out.items()}


def _fourier(spec: MeasureSpec, z: complex) -> complex:
    w = spec.bound if spec.kind == "decorated" else 170
    c = coeff_array(spec, w)
    n = np.arange(-w, w + 1)
    return complex(np.sum(c * z ** n.astype(float)))


def fourier_tau(spec: MeasureSpec, ord: OrderingSpec, l: int, z: complex, dual: bool = False) -> complex:
    """F_mu(z) as a quotient of Miwa-shifted tau-functions (``dual`` uses the family 1 minors)."""
    z = complex(z)
    a = class_of(ord, l)
    lp1, lp2 = l_assoc(ord, l, 1, "plus"), l_assoc(ord, l, 2, "plus")
    e = nu_plus(ord, lp1) + nu_minus(ord, lp2) - 1
    if dual:
        p = _assoc_of(shifted(spec, 1 / z, 1, 1), ord, l + 1, 1, "+", 1)
        q = _assoc_of(shifted(spec, z, 2, -1), ord, l + 1, 1, "+", 2)
        den_fam, den_sign = (2, 1) if a == 1 else (1, -1)
    else:
        p = _assoc_of(shifted(spec, z, 2, -1), ord, l + 1, 2, "+", 1)
        q = _assoc_of(shifted(spec, 1 / z, 1, 1), ord, l + 1, 2, "+", 2)
        den_fam, den_sign = (1, -1) if a == 1 else (2, 1)
    den_w = 1 / z if den_fam == 1 else z
    den = _tau_of(shifted(spec, den_w, den_fam, den_sign), ord, l)
    # class 1: the class-2 minor carries z^-e (first form) or z^e (dual form)
    if a == 1:
        num = p + z ** (e if dual else -e) * q
    else:
        num = z ** (-e if dual else e) * p + q
    return num / (2 * np.pi * den)


def tau_second_kind_residual(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int,
                             z: complex) -> float:
    """Largest mismatch over the second kind and Fourier tau representations at z.

    Each mismatch is relative to the largest of the two values and the
    rounding scale of the minor, so functions that nearly vanish are judged
    against the precision their determinant can deliver.
    """
    reps = second_kind_representations(spec, ord, times, l, z)
    if not reps:
        raise OutsideRegion(f"no representation applies at |z|={abs(z)}")
    return max(_rel(x, y, s) for x, y, s in reps.values())


def _integrand(spec, ord, t, tp, k, l):
    p1 = phi(gauss_borel(build(deform(spec, t), ord, k + 1)), ord, 1, k)
    p2 = phi(gauss_borel(build(deform(spec, tp), ord, l + 1)), ord, 2, l)
    p2bar = {e: np.conj(c) for e, c in p2.coeffs.items()}
    c = coeff_array(spec, 170 if spec.kind != "decorated" else spec.bound)
    w = (len(c) - 1) // 2
    n = np.arange(-w, w + 1)

    def f(z):
        zi = 1 / z
        q = sum(c_ * zi**e for e, c_ in p2bar.items())
        fmu = np.sum(c[None, :] * z[:, None] ** n[None, :].astype(float), axis=1)
        ex = np.exp(sum(tj * z ** (j + 1) for j, tj in enumerate(t.t1))
                    - sum(tj * zi ** (j + 1) for j, tj in enumerate(tp.t2)))
        return p1(z) * q * zi * fmu * ex

    return f


def contour_integral(f, r: float, N: int) -> complex:
    """(1/2 pi i) times the counterclockwise integral of f over |z| = r, trapezoid rule."""
    z = r * np.exp(2j * np.pi * np.arange(N) / N)
    return complex(np.mean(f(z) * z))


def bilinear_residual(spec: MeasureSpec, ord: OrderingSpec, t: DeformationTimes, tp: DeformationTimes,
                      k: int, l: int, r0: float = 0.5, rInf: float = 2.0, N: int = 2048) -> float:
    """Mismatch of the bilinear contour identity between a small and a large circle.

    Both circles are run counterclockwise as seen from the origin.
    """
    lo, hi = spec.annulus()
    if lo > 0 or hi < math.inf:
        raise OutsideRegion("the contour identity needs a weight with Fourier series convergent on C minus 0")
    if not r0 < 1 < rInf:
        raise OutsideRegion(f"need r0 < 1 < rInf, got {r0}, {rInf}")
    f = _integrand(spec, ord, t, tp, k, l)
    i0 = contour_integral(f, r0, N)
    i1 = contour_integral(f, rInf, N)
    # orthogonality makes both integrals vanish when t = t' and k != l, so the
    # size of the integrand on the small circle also enters the normalization
    z = r0 * np.exp(2j * np.pi * np.arange(N) / N)
    scale = float(np.mean(np.abs(f(z) * z)))
    return abs(i0 - i1) / max(abs(i0), scale, 1e-30)


def wave_bilinear_residual(spec: MeasureSpec, ord: OrderingSpec, t: DeformationTimes, tp: DeformationTimes,
                           n: int, m: int, r0: float = 0.5, N: int = 512) -> float:
    """Small-circle integrals of Psi1(z,t) conj(Psi1*(conj z,t')) and the same with Psi2, Psi2*."""
    from .toda import factors_at_time, wave_eval

    lo, hi = spec.annulus()
    if lo > 0 or hi < math.inf:
        raise OutsideRegion("the contour identity needs a weight with Fourier series convergent on C minus 0")
    size = max(n, m) + 1
    gt, gtp = factors_at_time(spec, ord, t, size), factors_at_time(spec, ord, tp, size)
    zs = r0 * np.exp(2j * np.pi * np.arange(N) / N)

    def pair(a, b):
        return np.array([wave_eval(gt, spec, t, ord, n, z, a) * np.conj(wave_eval(gtp, spec, tp, ord, m, np.conj(z), b))
                         for z in zs])

    f1, f2 = pair("Psi1", "Psi1*"), pair("Psi2", "Psi2*")
    i1, i2 = np.mean(f1 * zs), np.mean(f2 * zs)
    scale = max(abs(i1), float(np.mean(np.abs(f1 * zs))), 1e-30)
    return float(abs(i1 - i2) / scale)
