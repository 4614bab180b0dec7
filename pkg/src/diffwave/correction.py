"""Correction pairs (v_hat, u_hat) that carry the far-field momentum u_+ beta(t).

Both regimes share one shape function, a unit-mass C-infinity bump m0 on
[1, 3].  Because its support stays away from x = 0 the boundary identities
(u_hat(0)=0 for Dirichlet, v_hat(0)=u_hat_x(0)=0 for Neumann) hold exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .model import DampingSchedule, beta_kernel, B_tail

__all__ = ["Mollifier", "CorrectionPair", "mollifier_eval", "correction_eval", "correction_cell_average",
           "bump"]


def bump(x, lo, hi):
    """Unnormalised bump exp(-1/(1-y^2)) with y the affine image of [lo, hi] on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    y = (2.0 * x - (lo + hi)) / (hi - lo)
    out = np.zeros_like(y)
    inside = np.abs(y) < 1.0
    yi = y[inside]
    out[inside] = np.exp(-1.0 / (1.0 - yi * yi))
    return out


@dataclass(frozen=True)
class Mollifier:
    """Unit-mass bump m0 supported on [lo, hi] (default [1, 3])."""

    lo: float = 1.0
    hi: float = 3.0
    table_size: int = 2**14

    def __post_init__(self):
        if not 0.0 < self.lo < self.hi:
            raise ValueError("support must be an interval inside (0, inf)")

    @cached_property
    def norm(self):
        val, _ = integrate.quad(lambda s: float(bump(s, self.lo, self.hi)), self.lo, self.hi,
                                epsabs=0.0, epsrel=1e-13, limit=200)
        return val

    @cached_property
    def _cumulative(self):
        # per-cell Gauss-Legendre sums; the interpolant uses m0 itself as slope
        xs = np.linspace(self.lo, self.hi, self.table_size)
        nodes, weights = np.polynomial.legendre.leggauss(8)
        a, b = xs[:-1], xs[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid[:, None] + half[:, None] * nodes[None, :]
        cell = half * (bump(pts, self.lo, self.hi) @ weights) / self.norm
        cum = np.concatenate([[0.0], np.cumsum(cell)])
        cum /= cum[-1]
        return CubicHermiteSpline(xs, cum, self.value(xs))

    def value(self, x):
        return bump(x, self.lo, self.hi) / self.norm

    def antiderivative(self, x):
        """Integral of m0 over [0, x]."""
        x = np.asarray(x, dtype=float)
        out = np.where(x >= self.hi, 1.0, 0.0)
        inside = (x > self.lo) & (x < self.hi)
        if np.any(inside):
            out = np.where(inside, self._cumulative(np.clip(x, self.lo, self.hi)), out)
        return out

    def tail(self, x):
        """Integral of m0 over [x, inf)."""
        return 1.0 - self.antiderivative(x)

    @cached_property
    def _second(self):
        return self._cumulative.antiderivative()

    def second_antiderivative(self, x):
        """Integral of M0 over [0, x]; the symmetric bump gives (hi - lo)/2 at x = hi."""
        x = np.asarray(x, dtype=float)
        full = 0.5 * (self.hi - self.lo) + np.maximum(x - self.hi, 0.0)
        out = np.where(x >= self.hi, full, 0.0)
        inside = (x > self.lo) & (x < self.hi)
        if np.any(inside):
            G = self._second
            out = np.where(inside, G(np.clip(x, self.lo, self.hi)) - G(self.lo), out)
        return out


def mollifier_eval(m0: Mollifier, x, want="value"):
    x = np.asarray(x, dtype=float)
    if want == "value":
        out = m0.value(x)
    elif want == "antiderivative":
        out = m0.antiderivative(x)
    elif want == "tail":
        out = m0.tail(x)
    else:
        raise ValueError(f"unknown mollifier field {want!r}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CorrectionPair:
    """(v_hat, u_hat) for one boundary regime.

    Dirichlet: v_hat = u_+ m0 B,            u_hat = u_+ beta M0(x)
    Neumann:   v_hat = -(u0(0)-u_+) m0 B,   u_hat = [u_+ + (u0(0)-u_+) (1 - M0(x))] beta
    where M0 is the antiderivative of m0 from 0.
    """

    regime: str
    u_plus: float
    sched: DampingSchedule
    u0_at_0: float | None = None
    m0: Mollifier = field(default_factory=Mollifier)

    def __post_init__(self):
        if self.regime not in ("dirichlet", "neumann"):
            raise ValueError(f"unknown correction regime {self.regime!r}")
        if self.regime == "neumann" and self.u0_at_0 is None:
            raise ValueError("neumann corrections need u0(0)")

    @property
    def amplitude(self):
        """Coefficient multiplying m0(x) B(t) in v_hat."""
        if self.regime == "dirichlet":
            return self.u_plus
        return -(self.u0_at_0 - self.u_plus)

    @property
    def is_zero(self):
        if self.regime == "dirichlet":
            return self.u_plus == 0.0
        return self.u_plus == 0.0 and self.u0_at_0 == 0.0

    def evaluate(self, x, t, want="v"):
        return correction_eval(self, x, t, want)


def correction_eval(pair: CorrectionPair, x, t, want="v"):
    """Closed-form correction fields.

    ``want`` is one of ``"v"``, ``"u"``, ``"v_t"``, ``"u_x"``, ``"u_t"``.
    Time derivatives use B' = beta and beta' = -a beta analytically.
    """
    x = np.asarray(x, dtype=float)
    t = float(t)
    s = pair.sched
    amp = pair.amplitude
    if want == "v":
        out = amp * pair.m0.value(x) * B_tail(s, t) if amp != 0.0 else np.zeros_like(x)
    elif want == "v_t":
        out = amp * pair.m0.value(x) * beta_kernel(s, t)
    elif want == "u_x":
        # differentiate the u_hat shape itself (M0' = m0, (1 - M0)' = -m0), not the v_hat amplitude
        if pair.regime == "dirichlet":
            slope = pair.u_plus * pair.m0.value(x)
        else:
            slope = -(pair.u0_at_0 - pair.u_plus) * pair.m0.value(x)
        out = slope * beta_kernel(s, t)
    elif want in ("u", "u_t"):
        if pair.regime == "dirichlet":
            shape = pair.u_plus * pair.m0.antiderivative(x)
        else:
            shape = pair.u_plus + (pair.u0_at_0 - pair.u_plus) * pair.m0.tail(x)
        out = shape * beta_kernel(s, t)
        if want == "u_t":
            out = -s.coefficient(t) * out
    else:
        raise ValueError(f"unknown correction field {want!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def correction_cell_average(pair: CorrectionPair, faces, t, want="v"):
    """Exact averages of v_hat or u_hat over the cells bounded by ``faces``."""
    faces = np.asarray(faces, dtype=float)
    t = float(t)
    dx = np.diff(faces)
    m0 = pair.m0
    if want == "v":
        return pair.amplitude * B_tail(pair.sched, t) * np.diff(m0.antiderivative(faces)) / dx
    if want != "u":
        raise ValueError(f"cell averages exist for 'v' and 'u', not {want!r}")
    ramp = np.diff(m0.second_antiderivative(faces)) / dx  # cell mean of M0
    if pair.regime == "dirichlet":
        shape = pair.u_plus * ramp
    else:
        shape = pair.u_plus + (pair.u0_at_0 - pair.u_plus) * (1.0 - ramp)
    return shape * beta_kernel(pair.sched, t)
