"""Orthogonal Laurent polynomials on the unit circle via Gauss-Borel factorization."""

from .errors import OlpucError
from .factorization import gauss_borel, phi, verblunsky
from .measure import DeformationTimes, MeasureSpec, exp_cos_weight, fourier_table, lebesgue, trig_poly_weight
from .moments import build
from .ordering import CMV, OrderingSpec

__version__ = "0.1.0"

__all__ = [
    "CMV", "DeformationTimes", "MeasureSpec", "OlpucError", "OrderingSpec", "build", "exp_cos_weight",
    "fourier_table", "gauss_borel", "lebesgue", "phi", "trig_poly_weight", "verblunsky",
]
