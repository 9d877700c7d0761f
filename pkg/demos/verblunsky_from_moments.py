"""Reflection coefficients of exp(cos theta) three ways: LU of the CMV moment matrix,
LU of an extended (2,1) moment matrix, and a Toeplitz solve."""
import numpy as np
from scipy.linalg import solve_toeplitz

from olpuc import CMV, OrderingSpec, build, exp_cos_weight, gauss_borel, verblunsky
from olpuc.measure import coeff_array

spec = exp_cos_weight()
l = 8

a_cmv = verblunsky(gauss_borel(build(spec, CMV, l)), CMV).alpha1
ext = OrderingSpec(2, 1)
a_ext = verblunsky(gauss_borel(build(spec, ext, l)), ext).alpha1

# monic P_k from the Toeplitz normal equations; alpha_k = P_k(0)
c = coeff_array(spec, l)
a_toe = np.ones(l, dtype=complex)
for k in range(1, l):
    col = c[l : l + k]  # c_0 .. c_{k-1}
    row = c[l::-1][:k]  # c_0, c_-1, ..
    a = solve_toeplitz((col, row), -c[l - k : l])  # c_-k .. c_-1
    a_toe[k] = a[0]

print(" k      CMV LU          (2,1) LU        Toeplitz")
for k in range(l):
    print(f"{k:2d}  {a_cmv[k].real:+.12f}  {a_ext[k].real:+.12f}  {a_toe[k].real:+.12f}")
print("max |CMV - Toeplitz| =", np.max(np.abs(a_cmv - a_toe)))
