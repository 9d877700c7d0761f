"""Toda-type flows: Lax/Zakharov-Shabat matrices, the CMV Toeplitz lattice and discrete Darboux steps."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .cmv_operator import BandedOperator, jacobi_dressed
from .errors import OutsideRegion, SizeMismatch, TrustedLengthExhausted
from .factorization import GaussBorelFactors, VerblunskyData, gauss_borel, lu_nopivot, phi, verblunsky
from .measure import DeformationTimes, MeasureSpec, apply_discrete_factor, deform, eval_fseries
from .moments import build
from .ordering import CMV, OrderingSpec, UpsilonMatrix, build_upsilon


@dataclass(frozen=True)
class LaxPair:
    L1: BandedOperator  # S1 Ups S1^-1
    L2: BandedOperator  # S2 Ups^T S2^-1


def upper_part(a: np.ndarray) -> np.ndarray:
    """Projection onto upper triangular matrices, diagonal included."""
    return np.triu(a)


def strict_lower_part(a: np.ndarray) -> np.ndarray:
    return np.tril(a, -1)


def lax_and_zs(gb: GaussBorelFactors, ups: UpsilonMatrix, j_max: int = 1):
    """Lax matrices and the Zakharov-Shabat projections (L1^j)_+ and (L2^j)_-, j = 1..j_max."""
    if ups.size != gb.size:
        raise SizeMismatch(f"{ups.size} != {gb.size}")
    pair = LaxPair(jacobi_dressed(gb, ups, 1), jacobi_dressed(gb, ups, 2, transpose=True))
    b1, b2 = [], []
    p1 = np.eye(gb.size, dtype=complex)
    p2 = np.eye(gb.size, dtype=complex)
    for _ in range(j_max):
        p1 = p1 @ pair.L1.entries
        p2 = p2 @ pair.L2.entries
        b1.append(upper_part(p1))
        b2.append(strict_lower_part(p2))
    return pair, b1, b2


def toeplitz_rhs(v: VerblunskyData, flow: str, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives of alpha1_k and conj(alpha2_k), k = 1..n-2, along t11 or t21.

    Index 0 of the returned arrays is unused (alpha_0 = 1 is fixed).
    """
    a1 = np.asarray(v.alpha1, dtype=complex)
    a2b = np.conj(np.asarray(v.alpha2, dtype=complex))
    n = len(a1) if n is None else n
    d1 = np.zeros(n, dtype=complex)
    d2 = np.zeros(n, dtype=complex)
    k = np.arange(1, n - 1)
    r = 1 - a1[k] * a2b[k]
    if flow == "t11":
        d1[k] = a1[k + 1] * r
        d2[k] = -a2b[k - 1] * r
    elif flow == "t21":
        d1[k] = a1[k - 1] * r
        d2[k] = -a2b[k + 1] * r
    else:
        raise ValueError(flow)
    return d1, d2


@dataclass(frozen=True)
class FlowState:
    times: DeformationTimes
    v: VerblunskyData
    trusted_len: int


def _front_depth(t: float, tol: float = 1e-13) -> int:
    """Indices eaten by the frozen boundary: smallest d with t^d / d! < tol."""
    d = 1
    while t > 0 and t**d / math.factorial(d) >= tol:
        d += 1
    return d


def integrate_flow(v0: VerblunskyData, t11: complex, t21: complex, steps: int = 100,
                   trusted_len: int | None = None) -> VerblunskyData:
    """RK4 along the straight line 0 -> (t11, t21) of the lattice equations.

    The last index is frozen (its right-hand side needs alpha one step further),
    so the output keeps only indices the boundary error cannot have reached.
    """
    n = len(v0) if trusted_len is None else trusted_len
    out_len = n - _front_depth(abs(t11) + abs(t21))
    if out_len < 2:
        raise TrustedLengthExhausted(f"{n} coefficients cannot carry a flow of size {abs(t11) + abs(t21):.3g}")
    y1 = np.array(v0.alpha1[:n], dtype=complex)
    y2 = np.conj(np.array(v0.alpha2[:n], dtype=complex))
    logh0 = complex(np.log(complex(v0.h[0])))
    dt = 1.0 / steps

    def rhs(a1, a2b, _lh):
        v = VerblunskyData(a1, np.conj(a2b), np.zeros(n), np.zeros(n))
        f1, f2 = toeplitz_rhs(v, "t11")
        g1, g2 = toeplitz_rhs(v, "t21")
        dh = -a1[1] * t11 + a2b[1] * t21  # d log h0
        return t11 * f1 + t21 * g1, t11 * f2 + t21 * g2, dh

    state = (y1, y2, logh0)
    for _ in range(steps):
        k1 = rhs(*state)
        k2 = rhs(*(s + 0.5 * dt * k for s, k in zip(state, k1)))
        k3 = rhs(*(s + 0.5 * dt * k for s, k in zip(state, k2)))
        k4 = rhs(*(s + dt * k for s, k in zip(state, k3)))
        state = tuple(s + dt / 6 * (a + 2 * b + 2 * c + d) for s, a, b, c, d in zip(state, k1, k2, k3, k4))
    a1, a2b, lh = state
    a1, a2 = a1[:out_len], np.conj(a2b[:out_len])
    rho2 = np.zeros(out_len, dtype=complex)
    rho2[1:] = 1 - a1[1:] * np.conj(a2[1:])
    h = np.exp(lh) * np.cumprod(np.where(np.arange(out_len) == 0, 1, rho2))
    return VerblunskyData(a1, a2, rho2, h)


def refactorize_at_time(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int) -> VerblunskyData:
    """Ground truth: deform the measure, rebuild g^[l], factorize and read off."""
    return verblunsky(gauss_borel(build(deform(spec, times), ord, l)), ord)


def factors_at_time(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l: int) -> GaussBorelFactors:
    return gauss_borel(build(deform(spec, times), ord, l))


def write_trajectory_csv(path, rows) -> None:
    """rows: iterable of (t, VerblunskyData)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "k", "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2"])
        for t, v in rows:
            for k in range(len(v)):
                a, b = v.alpha1[k], v.alpha2[k]
                w.writerow([f"{t:.15g}", k, f"{a.real:.15g}", f"{a.imag:.15g}", f"{b.real:.15g}", f"{b.imag:.15g}"])


def _t_sum(ts, z) -> complex:
    return sum(t * z ** (j + 1) for j, t in enumerate(ts))


def wave_eval(gb_t: GaussBorelFactors, spec: MeasureSpec, times: DeformationTimes, ord: OrderingSpec,
              l: int, z: complex, which: str) -> complex:
    """Wave functions of the deformed measure from its Laurent polynomials.

    ``spec`` is the undeformed measure and ``gb_t`` the factors at ``times``.
    """
    z = complex(z)
    if z == 0:
        raise OutsideRegion("z = 0")
    if which == "Psi1":
        return complex(phi(gb_t, ord, 1, l)(z) * np.exp(_t_sum(times.t1, z)))
    if which == "Psi2*":
        return complex(phi(gb_t, ord, 2, l)(z) * np.exp(-_t_sum(np.conj(times.t2), z)))
    lo, hi = spec.annulus()
    if which == "Psi1*":
        if not lo < abs(z) < hi:
            raise OutsideRegion(f"|z|={abs(z)}")
        fbar = np.conj(eval_fseries(spec, np.conj(z), "full", N=spec.bound if spec.kind == "decorated" else 200))
        return complex(2 * np.pi * phi(gb_t, ord, 2, l)(1 / z) / z * fbar * np.exp(-_t_sum(np.conj(times.t2), 1 / z)))
    if which == "Psi2":
        if not lo < 1 / abs(z) < hi:
            raise OutsideRegion(f"|z|={abs(z)}")
        f = eval_fseries(spec, 1 / z, "full", N=spec.bound if spec.kind == "decorated" else 200)
        return complex(2 * np.pi * phi(gb_t, ord, 1, l)(1 / z) / z * f * np.exp(_t_sum(times.t1, 1 / z)))
    raise ValueError(which)


@dataclass(frozen=True)
class DiscreteStep:
    lam: complex
    direction: str  # "T1" or "T2"
    delta: np.ndarray  # leading block of S q S^-1
    delta_minus: np.ndarray  # unit lower, delta = delta_minus^-1 delta_plus
    delta_plus: np.ndarray
    trusted: int

    @property
    def omega(self) -> np.ndarray:
        """The factor with T(W) = omega W: delta_plus for T1, delta_minus for T2."""
        return self.delta_plus if self.direction == "T1" else self.delta_minus

    def flipped(self) -> np.ndarray:
        """delta_plus delta_minus^-1, the UL recombination."""
        return self.delta_plus @ np.linalg.inv(self.delta_minus)


_KIND = {
    ("D1", "T1"): "D1_forward",
    ("D2", "T2"): "D2_forward",
    ("conj_pair", "T1"): "conjugate_pair_1",
    ("conj_pair", "T2"): "conjugate_pair_2",
}


def discrete_q(ups: UpsilonMatrix, lam: complex, kind: str, direction: str) -> tuple[np.ndarray, str]:
    """The shift polynomial q and which factor (1 or 2) dresses it."""
    n = ups.size
    eye = np.eye(n)
    U, Ut = ups.entries, ups.T
    if kind == "D1":
        return U - lam * eye, "1"
    if kind == "D2":
        return Ut - lam * eye, "2"
    if direction == "T1":
        return (U - lam * eye) @ (Ut - np.conj(lam) * eye), "1"
    return (Ut - lam * eye) @ (U - np.conj(lam) * eye), "2"


def discrete_step(spec: MeasureSpec, gb: GaussBorelFactors, ord: OrderingSpec, lam: complex,
                  direction: str = "T1", kind: str = "D1") -> tuple[MeasureSpec, DiscreteStep]:
    """One Christoffel-type step: the new measure and the LU split of delta.

    D1 multiplies the weight by (z - lam) and D2 by (1/z - lam); conj_pair uses
    |z - lam|^2 (T1) or |z - conj lam|^2 (T2).  delta = S1 q S1^-1 for q acting
    on the left of g, S2 q S2^-1 for q acting on the right.  In every case
    T(S1) S1^-1 = delta_minus and T(S2) S2^-1 = delta_plus.
    """
    if (kind, direction) not in _KIND:
        raise ValueError(f"{kind} has no {direction} step")
    new_spec = apply_discrete_factor(spec, lam, _KIND[(kind, direction)])
    ups = build_upsilon(ord, gb.size)
    q, side = discrete_q(ups, lam, kind, direction)
    if side == "1":
        d = gb.S1 @ q @ gb.S1inv
    else:
        d = gb.S2 @ q @ gb.S2inv
    # q is banded, so the leading block away from the edge is exact
    band = 2 * (ord.n_plus + ord.n_minus) if kind == "conj_pair" else ord.period
    m = gb.size - band - 2
    low, up = lu_nopivot(d[:m, :m])
    dm = np.linalg.inv(low)
    return new_spec, DiscreteStep(complex(lam), direction, d[:m, :m], dm, up, m)


def row_relative(a: np.ndarray, ref: np.ndarray) -> float:
    """max_ij |a - ref| / max(1, max_j |ref_ij|): entries legitimately grow along rows."""
    scale = np.maximum(1.0, np.max(np.abs(ref), axis=1, keepdims=True))
    return float(np.max(np.abs(a - ref) / scale))


def discrete_residuals(spec: MeasureSpec, ord: OrderingSpec, size: int, lam: complex,
                       direction: str = "T1", kind: str = "D1") -> dict:
    """Compare the LU split of delta with the refactorized ratios, and check the UL flip."""
    gb = gauss_borel(build(spec, ord, size))
    new_spec, step = discrete_step(spec, gb, ord, lam, direction, kind)
    gb2 = gauss_borel(build(new_spec, ord, size))
    m = step.trusted
    r1 = (gb2.S1 @ gb.S1inv)[:m, :m]
    r2 = (gb2.S2 @ gb.S2inv)[:m, :m]
    ups = build_upsilon(ord, size)
    q, side = discrete_q(ups, lam, kind, direction)
    new_delta = (gb2.S1 @ q @ gb2.S1inv if side == "1" else gb2.S2 @ q @ gb2.S2inv)[:m, :m]
    # row i of delta_plus delta_minus^-1 reaches column i + upper band of delta_plus
    up = ord.n_plus + ord.n_minus + 2 if kind == "conj_pair" else max(ord.n_plus, ord.n_minus) + 1
    k = m - up
    flip = step.flipped()
    return {
        "lower": row_relative(r1, step.delta_minus),
        "upper": row_relative(r2, step.delta_plus),
        "darboux": row_relative(new_delta[:k], flip[:k]),
        "omega_conj": row_relative(step.delta_plus @ step.delta @ np.linalg.inv(step.delta_plus), flip),
    }


def lax_residual(spec: MeasureSpec, ord: OrderingSpec, size: int, times: DeformationTimes | None = None,
                 eps: float = 1e-3) -> float:
    """Central-difference dL1/dt11 against [B11, L1] on the interior block."""
    times = times or DeformationTimes()
    ups = build_upsilon(ord, size)
    step = DeformationTimes.first(eps)
    lp = lax_and_zs(factors_at_time(spec, ord, times + step, size), ups)[0].L1.entries
    lm = lax_and_zs(factors_at_time(spec, ord, times + step.scaled(-1), size), ups)[0].L1.entries
    pair, b1, _ = lax_and_zs(factors_at_time(spec, ord, times, size), ups)
    L = pair.L1.entries
    m = size - 2 * ord.margin
    lhs = (lp - lm) / (2 * eps)
    rhs = b1[0] @ L - L @ b1[0]
    return float(np.max(np.abs(lhs - rhs)[:m, :m]))


def zs_residual(spec: MeasureSpec, ord: OrderingSpec, size: int, times: DeformationTimes | None = None,
                eps: float = 1e-3) -> float:
    """dB11/dt21 - dB21/dt11 + [B11, B21] by central differences."""
    times = times or DeformationTimes()
    ups = build_upsilon(ord, size)

    def bs(t):
        _, b1, b2 = lax_and_zs(factors_at_time(spec, ord, t, size), ups)
        return b1[0], b2[0]

    s1, s2 = DeformationTimes.first(eps), DeformationTimes.first(0, eps)
    b1_p, _ = bs(times + s2)
    b1_m, _ = bs(times + s2.scaled(-1))
    _, b2_p = bs(times + s1)
    _, b2_m = bs(times + s1.scaled(-1))
    b1, b2 = bs(times)
    res = (b1_p - b1_m) / (2 * eps) - (b2_p - b2_m) / (2 * eps) + b1 @ b2 - b2 @ b1
    m = size - 2 * ord.margin
    return float(np.max(np.abs(res)[:m, :m]))


__all__ = [
    "LaxPair", "FlowState", "DiscreteStep", "lax_and_zs", "toeplitz_rhs", "integrate_flow",
    "refactorize_at_time", "factors_at_time", "wave_eval", "discrete_step", "discrete_residuals",
    "lax_residual", "zs_residual", "write_trajectory_csv", "upper_part", "strict_lower_part", "CMV",
]
