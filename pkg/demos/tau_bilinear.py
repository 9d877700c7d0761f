"""tau functions of the deformed exp(cos theta) weight: pivots, the Miwa-shift
representation of phi_1, and the bilinear identity for the wave functions."""
import numpy as np

from olpuc import CMV, DeformationTimes, exp_cos_weight
from olpuc import tau, toda

spec = exp_cos_weight()
t = DeformationTimes.first(0.05, 0.02)
gb = toda.factors_at_time(spec, CMV, t, 8)

for l in range(1, 7):
    print(f"tau_{l} = {tau.tau(spec, CMV, t, l).real:.12e}   prod h = {np.prod(gb.h[:l]).real:.12e}")

z = 0.7 + 0.3j
for l in (2, 4, 6):
    reps = tau.poly_representations(spec, CMV, t, l, z)
    direct, via_tau = reps["phi1"]
    print(f"phi1^({l})({z}) = {complex(direct):.10f}  from tau: {complex(via_tau):.10f}")

tp = DeformationTimes.first(0, 0.03)
for n, m in ((0, 0), (2, 1), (3, 3)):
    print(f"bilinear (n, m) = ({n}, {m}): residual {tau.wave_bilinear_residual(spec, CMV, t, tp, n, m):.1e}")
