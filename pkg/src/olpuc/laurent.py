"""Finite Laurent polynomials stored as exponent -> coefficient maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class LaurentPoly:
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    @classmethod
    def from_vector(cls, exponents, values) -> "LaurentPoly":
        out: dict[int, complex] = {}
        for e, v in zip(exponents, values):
            out[int(e)] = out.get(int(e), 0j) + complex(v)
        return cls(out)

    @classmethod
    def monomial(cls, e: int, c: complex = 1.0) -> "LaurentPoly":
        return cls({int(e): complex(c)})

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for e, c in self.coeffs.items():
            out = out + c * z**e
        return out if out.ndim else complex(out)

    def coeff(self, e: int) -> complex:
        return self.coeffs.get(int(e), 0j)

    @property
    def support(self) -> tuple[int, int]:
        """(lowest, highest) exponent carrying a coefficient."""
        if not self.coeffs:
            return (0, 0)
        return (min(self.coeffs), max(self.coeffs))

    def window(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.coeff(e) for e in range(lo, hi + 1)], dtype=complex)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0j) + c
        return LaurentPoly(out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + other.scale(-1.0)

    def scale(self, s: complex) -> "LaurentPoly":
        return LaurentPoly({e: s * c for e, c in self.coeffs.items()})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by z**k."""
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def reflect(self) -> "LaurentPoly":
        """The Laurent polynomial z -> conj(p(1/conj(z)))."""
        return LaurentPoly({-e: np.conj(c) for e, c in self.coeffs.items()})

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def distance(self, other: "LaurentPoly") -> float:
        """Max coefficient difference."""
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self.coeff(e) - other.coeff(e)) for e in keys), default=0.0)
