"""Orderings of Laurent monomials and the shift operator they induce.

An ordering (n+, n-) lists n+ fresh nonnegative powers of z, then n- fresh
negative powers, and repeats.  (1, 1) is 1, 1/z, z, 1/z^2, z^2, ...
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NoSuchIndex


@dataclass(frozen=True)
class OrderingSpec:
    n_plus: int = 1
    n_minus: int = 1

    def __post_init__(self):
        if self.n_plus < 1 or self.n_minus < 1:
            raise ValueError("both block lengths must be positive")

    @property
    def period(self) -> int:
        return self.n_plus + self.n_minus

    @property
    def is_cmv(self) -> bool:
        return self.n_plus == 1 and self.n_minus == 1

    @property
    def margin(self) -> int:
        """Rows/columns near a truncation edge that are not trusted."""
        return self.n_plus + self.n_minus + 2

    @classmethod
    def parse(cls, text: str) -> "OrderingSpec":
        a, b = text.split(",")
        return cls(int(a), int(b))

    def __str__(self) -> str:
        return f"{self.n_plus},{self.n_minus}"


CMV = OrderingSpec(1, 1)


def index_exponent(ord: OrderingSpec, j: int) -> int:
    """Exponent J(j) with chi^(j)(z) = z^J(j)."""
    b, r = divmod(int(j), ord.period)
    if r < ord.n_plus:
        return b * ord.n_plus + r
    return -(b * ord.n_minus + (r - ord.n_plus) + 1)


@lru_cache(maxsize=256)
def _exps(ord: OrderingSpec, n: int) -> np.ndarray:
    out = np.array([index_exponent(ord, j) for j in range(n)], dtype=int)
    out.setflags(write=False)
    return out


def exponents(ord: OrderingSpec, n: int) -> np.ndarray:
    """J(0), ..., J(n-1)."""
    return _exps(ord, int(n))


def exponent_index(ord: OrderingSpec, e: int) -> int:
    """Inverse of ``index_exponent``."""
    e = int(e)
    if e >= 0:
        b, r = divmod(e, ord.n_plus)
        return b * ord.period + r
    b, r = divmod(-e - 1, ord.n_minus)
    return b * ord.period + ord.n_plus + r


def chi(ord: OrderingSpec, n: int, z) -> np.ndarray:
    """The first n entries of the monomial vector at z (last axis)."""
    z = np.asarray(z, dtype=complex)
    return z[..., None] ** exponents(ord, n)


def class_of(ord: OrderingSpec, l: int) -> int:
    """1 for nonnegative powers, 2 for negative ones."""
    return 1 if index_exponent(ord, l) >= 0 else 2


def nu_plus(ord: OrderingSpec, l: int) -> int:
    """How many of the indices 0..l are of class 1."""
    b, r = divmod(int(l) + 1, ord.period)
    return b * ord.n_plus + min(r, ord.n_plus)


def nu_minus(ord: OrderingSpec, l: int) -> int:
    return int(l) + 1 - nu_plus(ord, l)


def l_assoc(ord: OrderingSpec, l: int, a: int, dir: str) -> int:
    """Smallest index >= l (dir='plus') or largest <= l (dir='minus') of class a."""
    if dir == "plus":
        j = int(l)
        while class_of(ord, j) != a:
            j += 1
        return j
    j = int(l)
    while j >= 0 and class_of(ord, j) != a:
        j -= 1
    if j < 0:
        raise NoSuchIndex(f"no index <= {l} of class {a}")
    return j


@dataclass(frozen=True)
class UpsilonMatrix:
    """Truncated shift: row j carries a 1 where the exponent is J(j)+1."""

    ord: OrderingSpec
    size: int
    entries: np.ndarray
    interior_rows: np.ndarray  # rows whose shifted index lies inside the block
    interior_cols: np.ndarray  # columns reached from a row inside the block

    @property
    def T(self) -> np.ndarray:
        return self.entries.T


def shift_target(ord: OrderingSpec, j: int, k: int = 1) -> int:
    """Index of z^k * chi^(j)."""
    return exponent_index(ord, index_exponent(ord, j) + k)


def build_upsilon(ord: OrderingSpec, size: int) -> UpsilonMatrix:
    if size < ord.period + 2:
        raise ValueError(f"size must be at least {ord.period + 2}")
    m = np.zeros((size, size), dtype=complex)
    rows = np.zeros(size, dtype=bool)
    for j in range(size):
        t = shift_target(ord, j)
        if t < size:
            m[j, t] = 1
            rows[j] = True
    cols = np.array([shift_target(ord, k, -1) < size for k in range(size)])
    return UpsilonMatrix(ord, size, m, rows, cols)
