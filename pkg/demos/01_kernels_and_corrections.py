"""
Damping kernels and the correction pair
=======================================

A freely damped velocity decays like beta(t); its remaining time integral
B(t) sets the size of the mass the correction pair has to carry.
"""
import numpy as np

from diffwave.correction import CorrectionPair
from diffwave.model import B_tail, DampingSchedule, beta_kernel, sandwich_threshold

# beta and B for a few damping exponents
ts = np.array([0.0, 1.0, 10.0, 100.0])
for lam in (0.0, 0.5, 0.9):
    s = DampingSchedule(1.0, lam)
    print(f"lambda={lam}: beta={beta_kernel(s, ts)}")
    print(f"            B   ={B_tail(s, ts)}")

# |B| sits between beta (1+t)^lam / alpha and twice that once t passes T*
s = DampingSchedule(1.0, 0.9)
T = sandwich_threshold(s, t_max=1e3, n=400)
print(f"sandwich holds from T* = {T:.1f} for alpha=1, lambda=0.9")

# the correction pair conserves mass and is damped like the velocity
pair = CorrectionPair("dirichlet", 0.02, DampingSchedule(1.0, 0.5))
x = np.linspace(0, 5, 11)
res = pair.evaluate(x, 2.0, "v_t") - pair.evaluate(x, 2.0, "u_x")
print("v_t - u_x on a few points:", np.max(np.abs(res)))

# (1+t)^4 ||v_hat|| collapses: the correction decays faster than any power
for t in (10.0, 100.0, 1000.0):
    print(t, (1 + t) ** 4 * np.max(np.abs(pair.evaluate(np.linspace(1, 3, 201), t, "v"))))
