"""Christoffel-Darboux kernel: partial sums, the ABC quadratic form and the CD quotient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDiagonal, IndexOutOfRange, SingularMinor
from .factorization import GaussBorelFactors, _cofactors_last_col, phi_matrix
from .laurent import LaurentPoly
from .measure import MeasureSpec, fourier_coeff
from .moments import MomentMatrix
from .ordering import OrderingSpec, chi, exponents, index_exponent, l_assoc


def kernel_sum(gb: GaussBorelFactors, ord: OrderingSpec, l: int, z: complex, zp: complex) -> complex:
    """sum_{k<l} phi_1^(k)(z') conj(phi_2^(k)(z))."""
    if l > gb.size:
        raise IndexOutOfRange(f"l={l} with size {gb.size}")
    p1 = phi_matrix(gb, 1)[:l, :l] @ chi(ord, l, zp)
    p2 = phi_matrix(gb, 2)[:l, :l] @ chi(ord, l, z)
    return complex(np.sum(p1 * np.conj(p2)))


def kernel_abc(g: MomentMatrix, ord: OrderingSpec, l: int, z: complex, zp: complex) -> complex:
    """chi(z)^dagger (g^[l])^-1 chi(z')."""
    a = g.entries[:l, :l]
    try:
        y = np.linalg.solve(a, chi(ord, l, zp))
    except np.linalg.LinAlgError as exc:
        raise SingularMinor(l) from exc
    return complex(np.vdot(chi(ord, l, z), y))


@dataclass(frozen=True)
class AssociatedPolys:
    """Associated Laurent polynomials for the CD formula at level l.

    ``phi1_plus[a]`` and ``phi2_plus[a]`` are the level-l polynomials that jump to
    the next class-a index; the ``minus`` maps hold the level l-1 companions.
    """

    l: int
    ord: OrderingSpec
    phi1_plus: dict
    phi1_minus: dict
    phi2_plus: dict
    phi2_minus: dict


def _need(g: MomentMatrix, n: int) -> None:
    if g.size < n:
        raise IndexOutOfRange(f"moment matrix of size {g.size}, need {n}")


def _plus_linear(g: MomentMatrix, ord: OrderingSpec, l: int, a: int, family: int) -> LaurentPoly:
    t = l_assoc(ord, l, a, "plus")
    _need(g, t + 1)
    G = g.entries
    gl = G[:l, :l]
    if family == 1:
        w = np.linalg.solve(gl.T, G[t, :l])  # row g_{t,0:l} (g^[l])^-1
    else:
        # conj(g_{0:l,t})^T ((g^[l])^-1)^dagger
        w = np.conj(np.linalg.solve(gl, G[:l, t]))
    e = np.append(exponents(ord, l), index_exponent(ord, t))
    return LaurentPoly.from_vector(e, np.append(-w, 1.0))


def _minus_linear(g: MomentMatrix, ord: OrderingSpec, l: int, a: int, family: int) -> LaurentPoly:
    t = l_assoc(ord, l, a, "minus")
    _need(g, l + 1)
    inv = np.linalg.inv(g.entries[: l + 1, : l + 1])
    row = inv[t] if family == 1 else np.conj(inv[:, t])
    return LaurentPoly.from_vector(exponents(ord, l + 1), row)


def _plus_det(g: MomentMatrix, ord: OrderingSpec, l: int, a: int, family: int) -> LaurentPoly:
    t = l_assoc(ord, l, a, "plus")
    _need(g, t + 1)
    G = g.entries
    den = np.linalg.det(G[:l, :l]) if l else 1.0
    if den == 0:
        raise SingularMinor(l)
    idx = list(range(l)) + [t]
    e = exponents(ord, t + 1)[idx]
    if family == 1:
        block = np.hstack([G[np.ix_(idx, range(l))], np.zeros((l + 1, 1))])
        return LaurentPoly.from_vector(e, _cofactors_last_col(block) / den)
    block = np.vstack([G[np.ix_(range(l), idx)], np.zeros((1, l + 1))])
    return LaurentPoly.from_vector(e, np.conj(_cofactors_last_col(block.T) / den))


def _minus_det(g: MomentMatrix, ord: OrderingSpec, l: int, a: int, family: int) -> LaurentPoly:
    t = l_assoc(ord, l, a, "minus")
    _need(g, l + 1)
    G = g.entries[: l + 1, : l + 1]
    den = np.linalg.det(G)
    if den == 0:
        raise SingularMinor(l + 1)
    sign = (-1) ** (l + t)
    if family == 1:
        block = np.hstack([np.delete(G, t, axis=1), np.zeros((l + 1, 1))])
        coef = sign * _cofactors_last_col(block) / den
    else:
        block = np.vstack([np.delete(G, t, axis=0), np.zeros((1, l + 1))])
        coef = np.conj(sign * _cofactors_last_col(block.T) / den)
    return LaurentPoly.from_vector(exponents(ord, l + 1), coef)


def associated(g: MomentMatrix, ord: OrderingSpec, l: int, method: str = "linear_solve") -> AssociatedPolys:
    if l < 1:
        raise IndexOutOfRange("l must be at least 1")
    plus, minus = {"linear_solve": (_plus_linear, _minus_linear),
                   "determinantal": (_plus_det, _minus_det)}[method]
    maps = [{}, {}, {}, {}]
    for a in (1, 2):
        maps[0][a] = plus(g, ord, l, a, 1)
        maps[2][a] = plus(g, ord, l, a, 2)
        maps[1][a] = minus(g, ord, l - 1, a, 1)
        maps[3][a] = minus(g, ord, l - 1, a, 2)
    return AssociatedPolys(l, ord, *maps)


def cd_formula(assoc: AssociatedPolys, l: int, z: complex, zp: complex) -> complex:
    """Quotient form of K^[l](z, z') built from the associated polynomials."""
    if l != assoc.l:
        raise IndexOutOfRange(f"associated polynomials are for l={assoc.l}")
    den = 1 - zp * np.conj(z)
    if abs(den) < 1e-8:
        raise DegenerateDiagonal(f"|1 - z' conj(z)| = {abs(den):.2e}")
    zb = np.conj(z)
    num = (zb * np.conj(assoc.phi2_plus[2](z)) * assoc.phi1_minus[2](zp)
           - assoc.phi1_plus[1](zp) * zb * np.conj(assoc.phi2_minus[1](z)))
    return complex(num / den)


def project(spec: MeasureSpec, gb: GaussBorelFactors, ord: OrderingSpec, l: int, f: LaurentPoly) -> LaurentPoly:
    """Kernel projection of f onto span{phi_1^(0..l-1)}.

    The inner products <f, chi^(j)> = 2 pi c_{J(j) - e} are exact moments, so no
    quadrature is involved.
    """
    e = exponents(ord, l)
    inner = np.zeros(l, dtype=complex)
    for p, c in f.coeffs.items():
        inner += c * 2 * np.pi * np.array([fourier_coeff(spec, int(j) - p) for j in e])
    s1 = phi_matrix(gb, 1)[:l, :l]
    s2 = phi_matrix(gb, 2)[:l, :l]
    weights = np.conj(s2) @ inner  # <f, phi_2^(k)>
    return LaurentPoly.from_vector(e, weights @ s1)
