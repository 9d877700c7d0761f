"""Truncated moment matrices g_jk = int chi^(j) conj(chi^(k)) dmu."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeMismatch
from .measure import MeasureSpec, coeff_array, fourier_coeff
from .ordering import OrderingSpec, UpsilonMatrix, exponents, index_exponent


@dataclass(frozen=True)
class MomentMatrix:
    ord: OrderingSpec
    size: int
    entries: np.ndarray
    source: MeasureSpec


def moment_entry(spec: MeasureSpec, ord: OrderingSpec, j: int, k: int) -> complex:
    return 2 * np.pi * fourier_coeff(spec, index_exponent(ord, k) - index_exponent(ord, j))


def moment_block(spec: MeasureSpec, ord: OrderingSpec, rows: int, cols: int | None = None) -> np.ndarray:
    """Dense rows x cols block of the (semi-infinite) moment matrix."""
    cols = rows if cols is None else cols
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=complex)
    er, ec = exponents(ord, rows), exponents(ord, cols)
    diff = ec[None, :] - er[:, None]
    width = int(np.max(np.abs(diff)))
    c = coeff_array(spec, width)
    return 2 * np.pi * c[diff + width]


def build(spec: MeasureSpec, ord: OrderingSpec, l: int) -> MomentMatrix:
    if l < 1:
        raise ValueError("size must be positive")
    return MomentMatrix(ord, l, moment_block(spec, ord, l), spec)


def check_quasidefinite(g: MomentMatrix, tol: float = 1e-10) -> tuple[list[float], bool]:
    """Leading minor magnitudes and whether all exceed tol * (max |g|)^k."""
    a = g.entries
    scale = np.max(np.abs(a))
    minors = [abs(np.linalg.det(a[:k, :k])) for k in range(1, g.size + 1)]
    ok = all(m > tol * scale**k for k, m in enumerate(minors, start=1))
    return minors, ok


def string_residual(g: MomentMatrix, ups: UpsilonMatrix) -> float:
    """Max |Ups g - g Ups| over the block not touched by truncation."""
    if ups.size != g.size:
        raise SizeMismatch(f"{ups.size} != {g.size}")
    d = ups.entries @ g.entries - g.entries @ ups.entries
    block = d[np.ix_(ups.interior_rows, ups.interior_cols)]
    return float(np.max(np.abs(block))) if block.size else 0.0
