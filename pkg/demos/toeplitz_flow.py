"""Evolve the reflection coefficients of 1 + cos(theta)/2 under the first Toda time
with RK4, and compare each sample with a fresh factorization of the deformed measure."""
import numpy as np

from olpuc import CMV, DeformationTimes, trig_poly_weight
from olpuc import toda

spec = trig_poly_weight(0.5)
n = 24
v0 = toda.refactorize_at_time(spec, CMV, DeformationTimes(), n)

print("  t     alpha1[1]      alpha2[1]      |ODE - refactorized| (k<=8)")  # real weight: real alphas
for t in np.linspace(0, 0.2, 5):
    v = toda.integrate_flow(v0, t, 0, 100) if t else v0
    ref = toda.refactorize_at_time(spec, CMV, DeformationTimes.first(t), n)
    err = max(np.max(np.abs(v.alpha1[:9] - ref.alpha1[:9])), np.max(np.abs(v.alpha2[:9] - ref.alpha2[:9])))
    print(f"{t:.2f}  {v.alpha1[1].real:+.10f}  {v.alpha2[1].real:+.10f}  {err:.1e}")

# Schur reduction t21 = -conj(t11): one real family
v = toda.integrate_flow(v0, 0.1, -0.1, 100)
print("Schur flow: max |Im alpha| =", np.max(np.abs(v.alpha1.imag)), " max |alpha1 - alpha2| =",
      np.max(np.abs(v.alpha1 - v.alpha2)))
