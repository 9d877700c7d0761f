"""Dressed shift operators J = S1 Ups S1^-1 and the recursions they encode."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OrderingNotCMV, SizeMismatch
from .factorization import GaussBorelFactors, VerblunskyData
from .ordering import OrderingSpec, UpsilonMatrix, build_upsilon, chi


@dataclass(frozen=True)
class BandedOperator:
    size: int
    lower_bandwidth: int
    upper_bandwidth: int
    entries: np.ndarray
    trusted: int  # leading block unaffected by truncation

    def outside_band(self, block: int | None = None) -> float:
        """Largest |entry| outside the declared band on the leading block."""
        n = self.trusted if block is None else block
        a = self.entries[:n, :n]
        i, j = np.indices(a.shape)
        mask = (j - i > self.upper_bandwidth) | (i - j > self.lower_bandwidth)
        return float(np.max(np.abs(a[mask]))) if mask.any() else 0.0


def trusted_size(size: int, ord: OrderingSpec) -> int:
    return max(size - ord.margin, 0)


def dress(left: np.ndarray, mid: np.ndarray, right: np.ndarray) -> np.ndarray:
    return left @ mid @ right


def jacobi_dressed(gb: GaussBorelFactors, ups: UpsilonMatrix, side: int = 1, transpose: bool = False) -> BandedOperator:
    """S_side Ups S_side^-1 (or with Ups^T when ``transpose``)."""
    if ups.size != gb.size:
        raise SizeMismatch(f"{ups.size} != {gb.size}")
    u = ups.entries.T if transpose else ups.entries
    if side == 1:
        a = dress(gb.S1, u, gb.S1inv)
    else:
        a = dress(gb.S2, u, gb.S2inv)
    o = ups.ord
    lo, up = (o.n_minus + 1, o.n_plus + 1) if transpose else (o.n_plus + 1, o.n_minus + 1)
    return BandedOperator(gb.size, lo, up, a, trusted_size(gb.size, o))


def jacobi_explicit_cmv(v: VerblunskyData, size: int, ord: OrderingSpec | None = None) -> BandedOperator:
    """Pentadiagonal J from the reflection coefficients (CMV ordering only)."""
    if ord is not None and not ord.is_cmv:
        raise OrderingNotCMV(str(ord))
    a1, a2, r2 = v.alpha1, v.alpha2, v.rho2
    n = min(size, len(a1) - 2)
    J = np.zeros((n, n), dtype=complex)

    def put(i, j, val):
        if 0 <= i < n and 0 <= j < n:
            J[i, j] = val

    for k in range((n + 1) // 2 + 1):
        e, o = 2 * k, 2 * k + 1
        if e + 2 < len(a1):
            put(e, e - 1, -r2[e] * a1[e + 1])
            put(e, e, -np.conj(a2[e]) * a1[e + 1])
            put(e, e + 1, -a1[e + 2])
            put(e, e + 2, 1.0)
        if o + 1 < len(a1):
            put(o, e - 1, r2[o] * r2[e])
            put(o, e, r2[o] * np.conj(a2[e]))
            put(o, o, -np.conj(a2[o]) * a1[o + 1])
            put(o, o + 1, np.conj(a2[o]))
    return BandedOperator(n, 2, 2, J, max(n - 1, 0))


def _phi_values(gb: GaussBorelFactors, ord: OrderingSpec, z: complex) -> np.ndarray:
    return gb.S1 @ chi(ord, gb.size, z)


def recursion_residual(gb: GaussBorelFactors, ord: OrderingSpec, z: complex, l: int | None = None) -> float:
    """Max |(J Phi)_l - z phi_l| and |(J^- Phi)_l - phi_l / z| over trusted rows.

    J^- = S1 Ups^T S1^-1 is the dressed inverse shift.  When ``l`` is given only
    that row is checked.
    """
    ups = build_upsilon(ord, gb.size)
    J = jacobi_dressed(gb, ups, 1)
    Jm = jacobi_dressed(gb, ups, 1, transpose=True)
    p = _phi_values(gb, ord, z)
    rows = range(J.trusted) if l is None else [l]
    rows = list(rows)
    fwd = (J.entries @ p - z * p)[rows]
    inv = (Jm.entries @ p - p / z)[rows]
    return float(max(np.max(np.abs(fwd)), np.max(np.abs(inv))))


def cmv_forward_relation(v: VerblunskyData, phis: np.ndarray, z: complex, l: int) -> complex:
    """Residual of the explicit four-term relation for z phi_1^(l)."""
    a1, a2, r2 = v.alpha1, v.alpha2, v.rho2
    p = lambda j: phis[j] if j >= 0 else 0.0
    if l % 2 == 0:
        k = l // 2
        rhs = (p(2 * k + 2) - a1[2 * k + 2] * p(2 * k + 1)
               - np.conj(a2[2 * k]) * a1[2 * k + 1] * p(2 * k)
               - r2[2 * k] * a1[2 * k + 1] * p(2 * k - 1))
    else:
        k = (l - 1) // 2
        rhs = (np.conj(a2[2 * k + 1]) * p(2 * k + 2)
               - np.conj(a2[2 * k + 1]) * a1[2 * k + 2] * p(2 * k + 1)
               + r2[2 * k + 1] * np.conj(a2[2 * k]) * p(2 * k)
               + r2[2 * k + 1] * r2[2 * k] * p(2 * k - 1))
    return z * phis[l] - rhs


def cmv_inverse_relation(v: VerblunskyData, phis: np.ndarray, z: complex, l: int) -> complex:
    """Residual of the explicit four-term relation for phi_1^(l) / z."""
    a1, a2, r2 = v.alpha1, v.alpha2, v.rho2
    p = lambda j: phis[j] if j >= 0 else 0.0
    if l == 0:
        rhs = p(1) - np.conj(a2[1]) * p(0)
    elif l % 2 == 0:
        k = l // 2
        rhs = (a1[2 * k] * p(2 * k + 1) - a1[2 * k] * np.conj(a2[2 * k + 1]) * p(2 * k)
               + r2[2 * k] * a1[2 * k - 1] * p(2 * k - 1)
               + r2[2 * k - 1] * r2[2 * k] * p(2 * k - 2))
    else:
        k = (l - 1) // 2
        rhs = (p(2 * k + 3) - np.conj(a2[2 * k + 3]) * p(2 * k + 2)
               - a1[2 * k + 1] * np.conj(a2[2 * k + 2]) * p(2 * k + 1)
               - r2[2 * k + 1] * np.conj(a2[2 * k + 2]) * p(2 * k))
    return phis[l] / z - rhs
