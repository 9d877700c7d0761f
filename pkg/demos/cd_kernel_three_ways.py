"""Christoffel-Darboux kernel of an extended (2,1) ordering: the partial sum,
the bordered ABC form and the quotient of associated polynomials agree."""
import numpy as np

from olpuc import OrderingSpec, build, exp_cos_weight, gauss_borel
from olpuc import cd_kernel

spec = exp_cos_weight()
ord = OrderingSpec(2, 1)
g = build(spec, ord, 24)
gb = gauss_borel(g)
z, zp = 0.9 + 0.5j, 1.3 - 0.2j

print(" l   sum                          rel ABC   rel quotient")
for l in range(3, 13):
    s = cd_kernel.kernel_sum(gb, ord, l, z, zp)
    a = cd_kernel.kernel_abc(g, ord, l, z, zp)
    c = cd_kernel.cd_formula(cd_kernel.associated(g, ord, l), l, z, zp)
    print(f"{l:2d}  {s.real:+.8e}{s.imag:+.8e}j  {abs(a - s) / abs(s):.1e}   {abs(c - s) / abs(s):.1e}")
