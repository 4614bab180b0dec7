"""Fast analytic-identity checks behind ``diffwave check``."""
from __future__ import annotations

import numpy as np
from scipy import integrate

from .correction import CorrectionPair
from .grid import Grid1D
from .model import B_tail, B_tail_closed_form, DampingSchedule, FarFieldState, GammaLaw, beta_kernel
from .asymptotics import fit_decay, predicted_rate
from .solver import SolverConfig, hyperbolic_flux, run
from .waves import gaussian_linear_wave


def _kernels():
    worst = 0.0
    for a in (1.0, 2.0):
        for lam in (0.0, 0.3, 0.6, 0.9):
            s = DampingSchedule(a, lam)
            for t in (0.0, 1.0, 10.0):
                ref = B_tail_closed_form(s, t)
                worst = max(worst, abs(B_tail(s, t) - ref) / abs(ref))
    return worst <= 1e-10, f"B(t) against the incomplete-gamma form: {worst:.2e}"


def _corrections():
    s = DampingSchedule(1.0, 0.5)
    x = np.linspace(0.0, 5.0, 101)
    worst = 0.0
    for pair in (CorrectionPair("dirichlet", 0.3, s), CorrectionPair("neumann", 0.3, s, u0_at_0=0.1)):
        for t in (0.0, 3.0, 30.0):
            r1 = pair.evaluate(x, t, "v_t") - pair.evaluate(x, t, "u_x")
            r2 = pair.evaluate(x, t, "u_t") + s.coefficient(t) * pair.evaluate(x, t, "u")
            worst = max(worst, np.max(np.abs(r1)), np.max(np.abs(r2)))
    return worst <= 1e-12, f"correction identities: {worst:.2e}"


def _gaussian():
    law, s = GammaLaw(), DampingSchedule(1.0, 0.3)
    ff = FarFieldState.from_model(law, s)
    w = gaussian_linear_wave(ff, 0.02, s, law)
    mass = integrate.quad(lambda y: w.evaluate(y, 5.0) - 1.0, -np.inf, np.inf, epsabs=0, epsrel=1e-12)[0]
    err = abs(mass - 0.02) / 0.02
    return err <= 1e-8, f"Gaussian wave mass: {err:.2e}"


def _flux():
    law = GammaLaw()
    fv, fu = hyperbolic_flux(1.1, 0.2, 1.1, 0.2, law, "llf")
    err = abs(fv + 0.2) + abs(fu - law.pressure(1.1))
    return err <= 1e-15, f"flux consistency: {err:.2e}"


def _constant_state():
    law, s = GammaLaw(), DampingSchedule(1.0, 0.3)
    ff = FarFieldState.from_model(law, s, 1.0, 0.5)
    cfg = SolverConfig(law, s, ff, Grid1D(40.0, 64), "neumann", t_end=20.0, sample_times=(20.0,), v_boundary=1.0)
    tr = run((np.ones(64), np.full(64, 0.5)), cfg)
    err = float(np.max(np.abs(tr.u[-1] / (0.5 * beta_kernel(s, 20.0)) - 1.0)))
    return err <= 1e-10, f"constant Neumann state against u_+ beta(t): {err:.2e}"


def _rates():
    ok = abs(predicted_rate("dirichlet", "v_Linf", 0.0).exponent - 0.75) < 1e-15
    ok &= abs(predicted_rate("dirichlet", "u_Linf", 0.8).exponent - 1.2) < 1e-12
    t = np.linspace(0.0, 100.0, 20)
    ok &= abs(fit_decay(t, 7.0 * (1.0 + t) ** -1.25).exponent - 1.25) < 1e-12
    return ok, "rate tables and exact power-law fit"


CHECKS = (_kernels, _corrections, _gaussian, _flux, _constant_state, _rates)


def selfcheck(verbose=False):
    """Run every check; returns True when all pass."""
    all_ok = True
    for check in CHECKS:
        ok, msg = check()
        all_ok &= bool(ok)
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {msg}")
    return all_ok
