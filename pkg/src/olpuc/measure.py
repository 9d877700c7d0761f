"""Measures on the unit circle described by their Fourier coefficients.

A measure is ``dmu(theta) = w(theta) dtheta`` and its coefficients are
``c_n = (1/2pi) int exp(-i n theta) dmu(theta)``, so ``c_n`` is the
coefficient of ``z**n`` in the Laurent expansion of the weight on the circle.
Decorations multiply the weight by factors such as ``exp(sum t1j z^j - t2j z^-j)``
or rational Miwa / Geronimus factors.  Their Laurent expansions are convolved
with the base coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import LambdaOnCircle, OutsideAnnulus, TruncationExceeded

DEFAULT_BOUND = 128
DEFAULT_QUAD_N = 4096
_TAIL_TOL = 1e-15

KINDS = ("lebesgue", "fourier_table", "trig_poly_weight", "exp_cos_weight", "decorated")
FACTOR_KINDS = (
    "toda_exp",
    "miwa1_plus",
    "miwa1_minus",
    "miwa2_plus",
    "miwa2_minus",
    "linear_z",
    "linear_zinv",
    "inverse_linear_z",
    "inverse_linear_zinv",
    "conjugate_pair",
    "inverse_conjugate_pair",
)


@dataclass(frozen=True)
class DeformationTimes:
    t1: tuple[complex, ...] = ()
    t2: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "t1", tuple(complex(x) for x in self.t1))
        object.__setattr__(self, "t2", tuple(complex(x) for x in self.t2))

    @classmethod
    def first(cls, t11: complex = 0.0, t21: complex = 0.0) -> "DeformationTimes":
        return cls((t11,), (t21,))

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.t1 + self.t2)

    @property
    def schur_reduced(self) -> bool:
        n = max(len(self.t1), len(self.t2))
        t1 = self.t1 + (0j,) * (n - len(self.t1))
        t2 = self.t2 + (0j,) * (n - len(self.t2))
        return all(abs(b + np.conj(a)) < 1e-14 for a, b in zip(t1, t2))

    def __add__(self, other: "DeformationTimes") -> "DeformationTimes":
        def pad_add(a, b):
            n = max(len(a), len(b))
            a = a + (0j,) * (n - len(a))
            b = b + (0j,) * (n - len(b))
            return tuple(x + y for x, y in zip(a, b))

        return DeformationTimes(pad_add(self.t1, other.t1), pad_add(self.t2, other.t2))

    def scaled(self, s: float) -> "DeformationTimes":
        return DeformationTimes(tuple(s * x for x in self.t1), tuple(s * x for x in self.t2))

    def exponent(self, z):
        """sum_j t1j z^j - t2j z^-j."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for j, t in enumerate(self.t1, start=1):
            out = out + t * z**j
        for j, t in enumerate(self.t2, start=1):
            out = out - t * z ** (-j)
        return out


@dataclass(frozen=True)
class Factor:
    kind: str
    times: DeformationTimes | None = None
    w: complex | None = None
    lam: complex | None = None
    continued: bool = False  # formal expansion of a Miwa inverse factor past the circle

    def __post_init__(self):
        if self.kind not in FACTOR_KINDS:
            raise ValueError(f"unknown factor kind {self.kind!r}")

    def __call__(self, z):
        """Value of the multiplier at z (used by the quadrature oracle)."""
        z = np.asarray(z, dtype=complex)
        k, w, lam = self.kind, self.w, self.lam
        if k == "toda_exp":
            return np.exp(self.times.exponent(z))
        if k == "miwa1_minus":
            return 1 - z / w
        if k == "miwa1_plus":
            return 1 / (1 - z / w)
        if k == "miwa2_plus":
            return 1 - w / z
        if k == "miwa2_minus":
            return 1 / (1 - w / z)
        if k == "linear_z":
            return z - lam
        if k == "linear_zinv":
            return 1 / z - lam
        if k == "inverse_linear_z":
            return 1 / (z - lam)
        if k == "inverse_linear_zinv":
            return 1 / (1 / z - lam)
        pair = (z - lam) * (1 / z - np.conj(lam))
        return pair if k == "conjugate_pair" else 1 / pair

    def annulus(self) -> tuple[float, float]:
        """Annulus (r, R) on which the stored Laurent expansion converges."""
        k = self.kind
        if self.continued or k in ("toda_exp", "miwa1_minus", "miwa2_plus", "linear_z", "linear_zinv", "conjugate_pair"):
            return (0.0, math.inf)
        if k == "miwa1_plus":
            return (0.0, abs(self.w))
        if k == "miwa2_minus":
            return (abs(self.w), math.inf)
        a = abs(self.lam)
        if k == "inverse_linear_z":
            return (a, math.inf) if a < 1 else (0.0, a)
        if k == "inverse_linear_zinv":
            return (0.0, 1 / a if a else math.inf) if a < 1 else (1 / a, math.inf)
        a = min(a, 1 / a) if a else 0.0
        return (a, 1 / a if a else math.inf)

    def laurent(self, width: int) -> np.ndarray:
        """Coefficients of z^-width .. z^width of the expansion on the circle."""
        n = 2 * width + 1
        out = np.zeros(n, dtype=complex)
        k, w, lam = self.kind, self.w, self.lam
        idx = np.arange(width + 1)
        if k == "toda_exp":
            out = _exp_series(self.times, width)
        elif k == "miwa1_minus":
            out[width] = 1
            out[width + 1] = -1 / w
        elif k == "miwa2_plus":
            out[width] = 1
            out[width - 1] = -w
        elif k == "miwa1_plus":
            # formal power series sum (z/w)^k, valid for |z| < |w|
            if abs(w) <= 1 and not self.continued:
                raise TruncationExceeded(f"(1 - z/w)^-1 with |w|={abs(w):.3g} does not converge on the circle")
            out[width:] = (1 / w) ** idx
        elif k == "miwa2_minus":
            if abs(w) >= 1 and not self.continued:
                raise TruncationExceeded(f"(1 - w/z)^-1 with |w|={abs(w):.3g} does not converge on the circle")
            out[: width + 1] = (w**idx)[::-1]
        elif k == "linear_z":
            out[width] = -lam
            out[width + 1] = 1
        elif k == "linear_zinv":
            out[width] = -lam
            out[width - 1] = 1
        elif k == "inverse_linear_z":
            out = _inverse_linear(lam, width)
        elif k == "inverse_linear_zinv":
            out = _inverse_linear(lam, width)[::-1].copy()
        elif k == "conjugate_pair":
            # (z - lam)(1/z - conj lam) = 1 + |lam|^2 - conj(lam) z - lam/z
            out[width] = 1 + abs(lam) ** 2
            out[width + 1] = -np.conj(lam)
            out[width - 1] = -lam
        else:
            a = _inverse_linear(lam, width)
            b = _inverse_linear(np.conj(lam), width)[::-1]
            out = _crop(np.convolve(a, b), width)
        if k in ("toda_exp", "miwa1_plus", "miwa2_minus", "inverse_linear_z",
                 "inverse_linear_zinv", "inverse_conjugate_pair") and not self.continued:
            _check_tail(out, self.kind)
        return out


def _crop(full: np.ndarray, width: int) -> np.ndarray:
    """Crop a convolution of two centred windows back to half-width ``width``."""
    mid = (len(full) - 1) // 2
    return full[mid - width: mid + width + 1]


def _check_tail(arr: np.ndarray, what: str) -> None:
    scale = np.max(np.abs(arr))
    if scale == 0:
        return
    if max(abs(arr[0]), abs(arr[-1])) > _TAIL_TOL * scale:
        raise TruncationExceeded(f"expansion of {what} factor is not negligible at the truncation bound")


def _inverse_linear(lam: complex, width: int) -> np.ndarray:
    """Circle expansion of 1/(z - lam)."""
    out = np.zeros(2 * width + 1, dtype=complex)
    a = abs(lam)
    if abs(a - 1) < 1e-12:
        raise LambdaOnCircle(f"|lambda| = {a}")
    if a < 1:
        # sum_k lam^k z^(-k-1)
        k = np.arange(width)
        out[width - 1 - k] = lam**k
    else:
        # -(1/lam) sum_k (z/lam)^k
        k = np.arange(width + 1)
        out[width + k] = -(1 / lam) ** (k + 1)
    return out


def _exp_series(times: DeformationTimes, width: int) -> np.ndarray:
    """Laurent coefficients of exp(sum t1j z^j - t2j z^-j), half-width ``width``."""
    pos = np.zeros(width + 1, dtype=complex)
    pos[0] = 1
    for j, t in enumerate(times.t1, start=1):
        pos = _mul_trunc(pos, _exp_mono(t, j, width), width)
    neg = np.zeros(width + 1, dtype=complex)
    neg[0] = 1
    for j, t in enumerate(times.t2, start=1):
        neg = _mul_trunc(neg, _exp_mono(-t, j, width), width)
    a = np.zeros(2 * width + 1, dtype=complex)
    a[width:] = pos
    b = np.zeros(2 * width + 1, dtype=complex)
    b[: width + 1] = neg[::-1]
    return _crop(np.convolve(a, b), width)


def _exp_mono(t: complex, j: int, width: int) -> np.ndarray:
    """Power series of exp(t u^j) up to u^width."""
    out = np.zeros(width + 1, dtype=complex)
    term = 1.0 + 0j
    for m in range(width // j + 1):
        out[m * j] = term
        term = term * t / (m + 1)
    return out


def _mul_trunc(a: np.ndarray, b: np.ndarray, width: int) -> np.ndarray:
    return np.convolve(a, b)[: width + 1]


@dataclass(frozen=True)
class MeasureSpec:
    kind: str
    coeff_items: tuple[tuple[int, complex], ...] = ()
    param_items: tuple[tuple[str, float], ...] = ()
    base: "MeasureSpec | None" = None
    decorations: tuple[Factor, ...] = ()
    bound: int = DEFAULT_BOUND

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "trig_poly_weight" and not abs(self.params.get("a", 0.0)) < 1:
            raise ValueError("trig_poly_weight needs |a| < 1")
        if self.kind == "decorated" and self.base is None:
            raise ValueError("decorated spec needs a base")

    @property
    def coeffs(self) -> dict[int, complex]:
        return dict(self.coeff_items)

    @property
    def params(self) -> dict[str, float]:
        return dict(self.param_items)

    def decorate(self, *factors: Factor) -> "MeasureSpec":
        if self.kind == "decorated":
            return replace(self, decorations=self.decorations + tuple(factors))
        return MeasureSpec("decorated", base=self, decorations=tuple(factors), bound=self.bound)

    @property
    def root(self) -> "MeasureSpec":
        return self.base if self.kind == "decorated" else self

    def annulus(self) -> tuple[float, float]:
        """Annulus (R-, R+) where the Fourier series converges."""
        lo, hi = 0.0, math.inf
        for f in self.decorations:
            a, b = f.annulus()
            lo, hi = max(lo, a), min(hi, b)
        return lo, hi

    def is_real(self) -> bool:
        """Whether the weight is real on the circle (c_-n = conj c_n)."""
        c = coeff_array(self, min(self.bound, 40))
        return bool(np.allclose(c, np.conj(c[::-1]), atol=1e-13, rtol=0))


def lebesgue() -> MeasureSpec:
    return MeasureSpec("lebesgue")


def fourier_table(coeffs: dict[int, complex]) -> MeasureSpec:
    items = tuple(sorted((int(n), complex(c)) for n, c in coeffs.items() if c != 0))
    return MeasureSpec("fourier_table", coeff_items=items)


def trig_poly_weight(a: float = 0.5) -> MeasureSpec:
    """Weight 1 + a cos(theta)."""
    return MeasureSpec("trig_poly_weight", param_items=(("a", float(a)),))


def exp_cos_weight() -> MeasureSpec:
    """Weight e + exp(cos theta) cos(sin theta); F(z) = e + (e^z + e^(1/z))/2."""
    return MeasureSpec("exp_cos_weight")


def _base_coeff(spec: MeasureSpec, n: int) -> complex:
    k = spec.kind
    if k == "lebesgue":
        return 1.0 + 0j if n == 0 else 0j
    if k == "fourier_table":
        return spec.coeffs.get(n, 0j)
    if k == "trig_poly_weight":
        a = spec.params.get("a", 0.0)
        return {0: 1.0 + 0j, 1: a / 2 + 0j, -1: a / 2 + 0j}.get(n, 0j)
    if k == "exp_cos_weight":
        m = abs(n)
        if m > 170:
            return 0j
        return 1 / (2 * math.factorial(m)) + (math.e + 0.5 if n == 0 else 0.0) + 0j
    raise ValueError(k)


def _base_density(spec: MeasureSpec, z: np.ndarray) -> np.ndarray:
    k = spec.kind
    if k == "lebesgue":
        return np.ones_like(z)
    if k == "fourier_table":
        out = np.zeros_like(z)
        for n, c in spec.coeff_items:
            out = out + c * z**n
        return out
    if k == "trig_poly_weight":
        return 1 + spec.params.get("a", 0.0) * (z + 1 / z) / 2
    if k == "exp_cos_weight":
        return math.e + (np.exp(z) + np.exp(1 / z)) / 2
    raise ValueError(k)


@lru_cache(maxsize=512)
def coeff_array(spec: MeasureSpec, width: int) -> np.ndarray:
    """c_-width .. c_width as an array (index n + width)."""
    if spec.kind != "decorated":
        return np.array([_base_coeff(spec, n) for n in range(-width, width + 1)], dtype=complex)
    if width > spec.bound:
        raise TruncationExceeded(f"coefficient index {width} beyond bound {spec.bound}")
    fw = 2 * spec.bound
    fac = np.zeros(2 * fw + 1, dtype=complex)
    fac[fw] = 1
    for f in spec.decorations:
        fac = _crop(np.convolve(fac, f.laurent(fw)), fw)
    base = coeff_array(spec.base, width + fw)
    full = np.convolve(base, fac)
    mid = (len(full) - 1) // 2
    return full[mid - width: mid + width + 1]


def fourier_coeff(spec: MeasureSpec, n: int) -> complex:
    n = int(n)
    if spec.kind == "fourier_table":
        return spec.coeffs.get(n, 0j)
    if spec.kind != "decorated":
        return _base_coeff(spec, n)
    if abs(n) > spec.bound:
        raise TruncationExceeded(f"|n|={abs(n)} beyond bound {spec.bound}")
    return complex(coeff_array(spec, spec.bound)[n + spec.bound])


def density(spec: MeasureSpec, z):
    """Weight w at points z of the circle, dmu = w dtheta."""
    z = np.asarray(z, dtype=complex)
    out = _base_density(spec.root, z)
    for f in spec.decorations:
        out = out * f(z)
    return out


def eval_fseries(spec: MeasureSpec, z: complex, mode: str = "full", k: int = 0, N: int = 60) -> complex:
    """Truncated Fourier series.

    ``full`` sums c_n z^n for |n| <= N; ``plus`` sums n >= -k; ``minus`` sums
    n < -k (both truncated at |n| <= N).
    """
    z = complex(z)
    if z == 0:
        raise OutsideAnnulus("z = 0")
    lo, hi = spec.annulus()
    r = abs(z)
    if mode == "full" and not lo < r < hi:
        raise OutsideAnnulus(f"|z|={r} outside ({lo}, {hi})")
    if mode == "plus" and not r < hi:
        raise OutsideAnnulus(f"|z|={r} outside disc of radius {hi}")
    if mode == "minus" and not r > lo:
        raise OutsideAnnulus(f"|z|={r} inside radius {lo}")
    if mode not in ("full", "plus", "minus"):
        raise ValueError(mode)
    c = coeff_array(spec, N)
    n = np.arange(-N, N + 1)
    if mode == "plus":
        mask = n >= -k
    elif mode == "minus":
        mask = n < -k
    else:
        mask = np.ones_like(n, dtype=bool)
    return complex(np.sum(c[mask] * z ** n[mask].astype(float)))


def quad_nodes(N: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(N) / N)


def integrate(spec: MeasureSpec, f: Callable, N: int = DEFAULT_QUAD_N) -> complex:
    """Trapezoid approximation of int_0^2pi f(e^{i theta}) dmu(theta)."""
    z = quad_nodes(N)
    try:
        vals = np.asarray(f(z), dtype=complex)
        if vals.shape != z.shape:
            vals = np.broadcast_to(vals, z.shape)
    except TypeError:
        vals = np.array([f(x) for x in z], dtype=complex)
    return complex(np.sum(vals * density(spec, z)) * 2 * np.pi / N)


def deform(spec: MeasureSpec, times: DeformationTimes) -> MeasureSpec:
    """Multiply the weight by exp(sum t1j z^j - t2j z^-j)."""
    if times.is_zero():
        return spec
    return spec.decorate(Factor("toda_exp", times=times))


_MIWA = {"1+": "miwa1_plus", "1-": "miwa1_minus", "2+": "miwa2_plus", "2-": "miwa2_minus"}


def miwa_shift(spec: MeasureSpec, w: complex, which: str, continued: bool = False) -> MeasureSpec:
    """Miwa shift of the times.

    ``1+``/``1-`` is t -> t +/- [1/w]_1, multiplying by (1 - z/w)^(-/+1);
    ``2+``/``2-`` is t -> t +/- [w]_2, multiplying by (1 - w/z)^(+/-1).

    With ``continued`` the inverse factors are expanded at 0 (``1+``) or at
    infinity (``2-``) wherever w lies.  The shifted moments are then the
    analytic continuation in w, which converges for |w| > R- (``1+``) or
    |w| < R+ (``2-``).
    """
    if w == 0:
        raise ValueError("Miwa parameter must be nonzero")
    if continued:
        lo, hi = spec.annulus()
        if (which == "1+" and not abs(w) > lo) or (which == "2-" and not abs(w) < hi):
            raise OutsideAnnulus(f"continued Miwa factor with |w|={abs(w):.3g} outside ({lo}, {hi})")
    return spec.decorate(Factor(_MIWA[which], w=complex(w), continued=continued))


_DISCRETE = {
    "D1_forward": ("linear_z", False),
    "D2_forward": ("linear_zinv", False),
    "D1_backward": ("inverse_linear_z", False),
    "D2_backward": ("inverse_linear_zinv", False),
    "conjugate_pair_1": ("conjugate_pair", False),
    "conjugate_pair_2": ("conjugate_pair", True),
}


def apply_discrete_factor(spec: MeasureSpec, lam: complex, kind: str) -> MeasureSpec:
    """Multiply by (z - lam), (1/z - lam), their inverses, or |z - lam|^2.

    ``conjugate_pair_2`` uses (1/z - lam)(z - conj lam), i.e. |z - conj lam|^2.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1) < 1e-12:
        raise LambdaOnCircle(f"|lambda| = {abs(lam)}")
    fk, flip = _DISCRETE[kind]
    return spec.decorate(Factor(fk, lam=np.conj(lam) if flip else lam))
