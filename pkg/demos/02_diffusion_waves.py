"""
Diffusion waves on the half-line
================================

The three wave families: the Gaussian of the linearised equation, the
Neumann self-similar profile and the Dirichlet wave from an implicit solve.
"""
import math

import numpy as np
from scipy import special

from diffwave.correction import Mollifier
from diffwave.model import DampingSchedule, FarFieldState, GammaLaw
from diffwave.waves import (
    dirichlet_diffusion_wave, dirichlet_wave_grid, gaussian_linear_wave, neumann_selfsimilar_profile,
)

law = GammaLaw(1.4)
sched = DampingSchedule(1.0, 0.5)
ff = FarFieldState.from_model(law, sched, 1.0)
print("kappa =", ff.kappa)

# Gaussian: the peak drops like (1+t)^(-(lam+1)/2)
g = gaussian_linear_wave(ff, 0.02, sched)
for t in (0.0, 10.0, 100.0):
    print(f"t={t:6.1f} peak excess {g.evaluate(0.0, t) - 1.0:.3e}")

# self-similar profile against erfc for a small boundary jump
w = neumann_selfsimilar_profile(1.001, ff, law, sched)
ref = 1.0 + 1e-3 * special.erfc(w.xi * math.sqrt(1.5 / (4 * ff.kappa)))
print("sup |phi - erfc| =", np.max(np.abs(w.phi - ref)))

# Dirichlet wave: mass is conserved and the sup norm decays
grid = dirichlet_wave_grid(ff, sched, 200.0, dx=0.1)
m0 = Mollifier()
vbar0 = 1.0 + 0.02 * np.diff(m0.antiderivative(grid.faces)) / grid.dx
times = np.concatenate([[0.0], np.geomspace(1.0, 200.0, 8)])
d = dirichlet_diffusion_wave(vbar0, ff, law, sched, grid, times)
for t, snap in zip(d.times, d.snapshots):
    print(f"t={t:7.2f} mass {np.sum(snap - 1.0) * grid.dx:.10f}  sup {np.max(np.abs(snap - 1.0)):.3e}")
