"""Gauss-Borel factorization g = S1^-1 S2 and the Laurent polynomials it produces."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_triangular

from .errors import IndexOutOfRange, NotPositiveMeasure, SingularMinor
from .laurent import LaurentPoly
from .measure import MeasureSpec, coeff_array
from .moments import MomentMatrix
from .ordering import OrderingSpec, class_of, exponents, nu_minus, nu_plus


@dataclass(frozen=True)
class GaussBorelFactors:
    S1: np.ndarray  # unit lower triangular
    S2: np.ndarray  # upper triangular, S1 @ g == S2
    h: np.ndarray
    ord: OrderingSpec | None = None

    @property
    def size(self) -> int:
        return self.S1.shape[0]

    @cached_property
    def S1inv(self) -> np.ndarray:
        return solve_triangular(self.S1, np.eye(self.size), lower=True, unit_diagonal=True)

    @cached_property
    def S2inv(self) -> np.ndarray:
        return solve_triangular(self.S2, np.eye(self.size), lower=False)


def lu_nopivot(a: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Doolittle LU without pivoting: a = L U with L unit lower triangular."""
    u = np.array(a, dtype=complex)
    n = u.shape[0]
    low = np.eye(n, dtype=complex)
    scale = np.max(np.abs(u)) or 1.0
    for k in range(n):
        piv = u[k, k]
        if abs(piv) < tol * scale:
            raise SingularMinor(k + 1)
        m = u[k + 1:, k] / piv
        low[k + 1:, k] = m
        u[k + 1:, k:] -= np.outer(m, u[k, k:])
        u[k + 1:, k] = 0
    return low, u


def gauss_borel(g: MomentMatrix | np.ndarray, tol: float = 1e-12) -> GaussBorelFactors:
    a = g.entries if isinstance(g, MomentMatrix) else np.asarray(g)
    low, u = lu_nopivot(a, tol)
    s1 = solve_triangular(low, np.eye(len(a)), lower=True, unit_diagonal=True)
    ord = g.ord if isinstance(g, MomentMatrix) else None
    return GaussBorelFactors(s1, u, np.diag(u).copy(), ord)


def phi(gb: GaussBorelFactors, ord: OrderingSpec, family: int, l: int) -> LaurentPoly:
    """phi_1^(l) = (S1 chi)_l or phi_2^(l) = ((S2^-1)^dagger chi)_l."""
    if not 0 <= l < gb.size:
        raise IndexOutOfRange(f"l={l} with size {gb.size}")
    e = exponents(ord, l + 1)
    if family == 1:
        return LaurentPoly.from_vector(e, gb.S1[l, : l + 1])
    return LaurentPoly.from_vector(e, np.conj(gb.S2inv[: l + 1, l]))


def phi_matrix(gb: GaussBorelFactors, family: int) -> np.ndarray:
    """Row l holds the coefficients of phi_family^(l) against chi."""
    return gb.S1 if family == 1 else np.conj(gb.S2inv).T


def _cofactors_last_col(m: np.ndarray) -> np.ndarray:
    """Cofactors of the last column of a square matrix."""
    n = m.shape[0]
    out = np.empty(n, dtype=complex)
    for k in range(n):
        minor = np.delete(np.delete(m, k, axis=0), n - 1, axis=1)
        out[k] = (-1) ** (k + n - 1) * (np.linalg.det(minor) if minor.size else 1.0)
    return out


def phi_determinantal(g: MomentMatrix, ord: OrderingSpec, family: int, l: int) -> LaurentPoly:
    """Bordered-determinant form of phi_family^(l)."""
    a = g.entries
    if l + 1 > g.size:
        raise IndexOutOfRange(f"l={l} with size {g.size}")
    e = exponents(ord, l + 1)
    if family == 1:
        den = np.linalg.det(a[:l, :l]) if l else 1.0
        if abs(den) == 0:
            raise SingularMinor(l)
        # rows 0..l of the first l columns, bordered by the chi column
        block = np.hstack([a[: l + 1, :l], np.zeros((l + 1, 1))])
        return LaurentPoly.from_vector(e, _cofactors_last_col(block) / den)
    den = np.linalg.det(a[: l + 1, : l + 1])
    if abs(den) == 0:
        raise SingularMinor(l + 1)
    # first l rows bordered by the conj(chi) row; expand along that row
    block = np.vstack([a[:l, : l + 1], np.zeros((1, l + 1))])
    cof = _cofactors_last_col(block.T)
    return LaurentPoly.from_vector(e, np.conj(cof / den))


@dataclass(frozen=True)
class VerblunskyData:
    alpha1: np.ndarray
    alpha2: np.ndarray
    rho2: np.ndarray
    h: np.ndarray

    def __len__(self) -> int:
        return len(self.alpha1)

    def truncated(self, n: int) -> "VerblunskyData":
        return VerblunskyData(self.alpha1[:n], self.alpha2[:n], self.rho2[:n], self.h[:n])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["l", "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2",
                        "re_rho2", "im_rho2", "re_h", "im_h"])
            for l in range(len(self)):
                vals = [self.alpha1[l], self.alpha2[l], self.rho2[l], self.h[l]]
                row = [l]
                for v in vals:
                    row += [f"{v.real + 0.0:.15g}", f"{v.imag + 0.0:.15g}"]
                w.writerow(row)


def verblunsky(gb: GaussBorelFactors, ord: OrderingSpec) -> VerblunskyData:
    """Read the reflection coefficients off the extreme coefficients.

    For a(l)=1 the lowest coefficient of phi_1 is alpha1 and of conj(h) phi_2 is
    alpha2; for a(l)=2 the highest ones are conj(alpha2) and conj(alpha1).
    """
    n = gb.size
    a1 = np.zeros(n, dtype=complex)
    a2 = np.zeros(n, dtype=complex)
    a1[0] = a2[0] = 1.0
    for l in range(1, n):
        p1, p2 = phi(gb, ord, 1, l), phi(gb, ord, 2, l)
        hb = np.conj(gb.h[l])
        if class_of(ord, l) == 1:
            e = -nu_minus(ord, l)
            a1[l] = p1.coeff(e)
            a2[l] = hb * p2.coeff(e)
        else:
            e = nu_plus(ord, l) - 1
            a2[l] = np.conj(p1.coeff(e))
            a1[l] = np.conj(hb * p2.coeff(e))
    rho2 = np.zeros(n, dtype=complex)
    rho2[1:] = gb.h[1:] / gb.h[:-1]
    return VerblunskyData(a1, a2, rho2, np.array(gb.h, dtype=complex))


def szego_from_olp(p: LaurentPoly, ord: OrderingSpec, l: int, h=None) -> np.ndarray:
    """Ascending coefficients of z^nu_-(l) p: P_l when a(l)=1, P_l^* otherwise."""
    if h is not None and np.max(np.abs(np.imag(h))) > 1e-10 * np.max(np.abs(h)):
        raise NotPositiveMeasure("pivots are not real")
    q = p.shift(nu_minus(ord, l))
    lo, hi = q.support
    if lo < 0 and max(abs(q.coeff(e)) for e in range(lo, 0)) > 1e-12 * (q.max_abs() or 1):
        raise ValueError("shifted Laurent polynomial has negative powers")
    return q.window(0, l)


def szego_oracle(spec: MeasureSpec, l: int) -> np.ndarray:
    """Monic P_l with int P_l z^-k dmu = 0 for k < l, from a Toeplitz solve."""
    if l == 0:
        return np.ones(1, dtype=complex)
    c = coeff_array(spec, l)
    k = np.arange(l)
    # sum_m a_m c_{k-m} = -c_{k-l}
    mat = c[(k[:, None] - k[None, :]) + l]
    rhs = -c[k - l + l]
    if abs(np.linalg.det(mat)) < 1e-300:
        raise SingularMinor(l)
    a = np.linalg.solve(mat, rhs)
    return np.append(a, 1.0 + 0j)


def reversed_poly(p: np.ndarray) -> np.ndarray:
    """P^*(z) = z^n conj(P(1/conj z)) for ascending coefficients."""
    return np.conj(p[::-1])


def szego_recursion(alpha: np.ndarray, l: int) -> tuple[np.ndarray, np.ndarray]:
    """(P_l, P_l^*) from P_k = z P_{k-1} + alpha_k P*_{k-1}, P*_k = conj(alpha_k) z P_{k-1} + P*_{k-1}."""
    p = np.ones(1, dtype=complex)
    ps = np.ones(1, dtype=complex)
    for k in range(1, l + 1):
        zp = np.concatenate([[0], p])
        ps_ext = np.concatenate([ps, [0]])
        p, ps = zp + alpha[k] * ps_ext, np.conj(alpha[k]) * zp + ps_ext
    return p, ps
