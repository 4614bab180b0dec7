"""Pressure laws, the time-dependent damping schedule and its scalar kernels.

The damped p-system reads

    v_t - u_x = 0,
    u_t + p(v)_x = -a(t) u,      a(t) = alpha / (1 + t)**lam,

and a freely damped velocity decays like ``beta(t)``.  ``B(t)`` is minus the
remaining time integral of ``beta``; it carries the far-field momentum into
the correction functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "DomainError",
    "PressureLaw",
    "GammaLaw",
    "DampingSchedule",
    "FarFieldState",
    "pressure",
    "pressure_deriv",
    "sound_speed",
    "damping_coefficient",
    "beta_kernel",
    "beta_kernel_deriv",
    "B_tail",
    "B_tail_closed_form",
    "sandwich_threshold",
]

EPS_TAIL = 1e-12


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""


def _check_volume(v):
    v = np.asarray(v, dtype=float)
    if np.any(~(v > 0)):
        raise DomainError("specific volume must be positive (vacuum or invalid state)")
    return v


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0)):
        raise DomainError("time must be non-negative")
    return t


def _scalar(x, like):
    return float(x) if np.ndim(like) == 0 else x


class PressureLaw:
    """Smooth decreasing pressure p(v) > 0.

    Subclasses implement ``_p`` and ``_dp(v, order)`` for orders 1..3.  This
    base is the hook for non-gamma laws.
    """

    max_order = 3

    def _p(self, v):
        raise NotImplementedError

    def _dp(self, v, order):
        raise NotImplementedError

    def pressure(self, v):
        v_arr = _check_volume(v)
        return _scalar(self._p(v_arr), v)

    def deriv(self, v, order=1):
        if order not in (1, 2, 3):
            raise ValueError(f"pressure derivative of order {order} is not supported (1..3)")
        v_arr = _check_volume(v)
        return _scalar(self._dp(v_arr, order), v)

    def sound_speed(self, v):
        """Characteristic speed sqrt(-p'(v))."""
        v_arr = _check_volume(v)
        return _scalar(np.sqrt(-self._dp(v_arr, 1)), v)

    # unchecked fast paths for the solver's inner loops
    def p_raw(self, v):
        return self._p(v)

    def dp_raw(self, v):
        return self._dp(v, 1)


@dataclass(frozen=True)
class GammaLaw(PressureLaw):
    """p(v) = v**(-gamma)."""

    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def _p(self, v):
        return v ** (-self.gamma)

    def _dp(self, v, order):
        g = self.gamma
        if order == 1:
            return -g * v ** (-g - 1.0)
        if order == 2:
            return g * (g + 1.0) * v ** (-g - 2.0)
        return -g * (g + 1.0) * (g + 2.0) * v ** (-g - 3.0)


@dataclass(frozen=True)
class DampingSchedule:
    """Damping rate a(t) = alpha / (1 + t)**lam with alpha > 0, 0 <= lam <= 1."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")

    def coefficient(self, t):
        return damping_coefficient(self, t)

    def beta(self, t):
        return beta_kernel(self, t)

    def beta_deriv(self, t):
        return beta_kernel_deriv(self, t)

    def B(self, t):
        return B_tail(self, t)

    def integral(self, t0, t1):
        """Exact integral of a(s) over [t0, t1]."""
        a, lam = self.alpha, self.lam
        if lam == 1.0:
            return a * math.log((1.0 + t1) / (1.0 + t0))
        m = 1.0 - lam
        return a * ((1.0 + t1) ** m - (1.0 + t0) ** m) / m

    def rescaled_time(self, t):
        """s(t) = ((1+t)**(lam+1) - 1)/(lam+1); the diffusion equations are autonomous in s."""
        q = self.lam + 1.0
        return ((1.0 + np.asarray(t, dtype=float)) ** q - 1.0) / q

    def physical_time(self, s):
        q = self.lam + 1.0
        return (1.0 + q * np.asarray(s, dtype=float)) ** (1.0 / q) - 1.0


@dataclass(frozen=True)
class FarFieldState:
    """Far-field constants (v_+, u_+) and the diffusivity kappa = -p'(v_+)/alpha."""

    v_plus: float
    u_plus: float
    kappa: float

    @classmethod
    def from_model(cls, law: PressureLaw, sched: DampingSchedule, v_plus=1.0, u_plus=0.0):
        kappa = -law.deriv(v_plus, 1) / sched.alpha
        return cls(float(v_plus), float(u_plus), float(kappa))

    def __post_init__(self):
        if not self.v_plus > 0:
            raise ValueError("v_plus must be positive")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")


def pressure(law: PressureLaw, v):
    return law.pressure(v)


def pressure_deriv(law: PressureLaw, v, order=1):
    return law.deriv(v, order)


def sound_speed(law: PressureLaw, v):
    return law.sound_speed(v)


def damping_coefficient(sched: DampingSchedule, t):
    t_arr = _check_time(t)
    return _scalar(sched.alpha * (1.0 + t_arr) ** (-sched.lam), t)


def beta_kernel(sched: DampingSchedule, t):
    """Free decay factor of the damped velocity, beta(0) = 1."""
    t_arr = _check_time(t)
    a, lam = sched.alpha, sched.lam
    if lam == 1.0:
        out = (1.0 + t_arr) ** (-a)
    else:
        m = 1.0 - lam
        out = np.exp(-a / m * np.expm1(m * np.log1p(t_arr)))
    return _scalar(out, t)


def beta_kernel_deriv(sched: DampingSchedule, t):
    """beta'(t) = -a(t) beta(t)."""
    t_arr = _check_time(t)
    out = -sched.alpha * (1.0 + t_arr) ** (-sched.lam) * beta_kernel(sched, t_arr)
    return _scalar(out, t)


def _tail_lower(sched, t):
    return beta_kernel(sched, t) * (1.0 + t) ** sched.lam / sched.alpha


def _sandwich_start(sched):
    # lam (1+t)**(lam-1) <= alpha/2 makes the factor-2 upper bound rigorous
    a, lam = sched.alpha, sched.lam
    if lam == 0.0 or lam <= a / 2.0:
        return 0.0
    return (2.0 * lam / a) ** (1.0 / (1.0 - lam)) - 1.0


def B_tail(sched: DampingSchedule, t):
    """B(t) = -integral_t^inf beta.

    Adaptive quadrature up to a truncation time T* beyond which the tail is
    replaced by the midpoint of the bracket
    ``beta(T)(1+T)^lam/alpha <= tail <= 2 beta(T)(1+T)^lam/alpha``.
    T* is pushed out until the bracket width falls below ``EPS_TAIL`` times
    the size of the result, so the error is relative as well as absolute.
    For lam = 1 the integral has the closed form -(1+t)**(1-alpha)/(alpha-1)
    and converges only for alpha > 1.
    """
    if np.ndim(t) > 0:
        return np.array([B_tail(sched, float(s)) for s in np.ravel(t)]).reshape(np.shape(t))
    t = float(_check_time(t))
    a, lam = sched.alpha, sched.lam
    if lam == 1.0:
        if a <= 1.0:
            raise DomainError("B(t) diverges for lambda = 1 unless alpha > 1")
        return -((1.0 + t) ** (1.0 - a)) / (a - 1.0)

    scale = _tail_lower(sched, t)
    if scale == 0.0:
        return -0.0
    T = max(t, _sandwich_start(sched))
    step = max(1.0, (1.0 + T) ** lam / a)
    # stop once the bracket underflows too; EPS_TAIL * scale can round to zero
    while 0.0 < 2.0 * _tail_lower(sched, T) >= EPS_TAIL * scale:
        T += step
        step *= 2.0
    tail = 1.5 * _tail_lower(sched, T)
    body = 0.0
    if T > t:
        # split at roughly one e-folding length to keep QUADPACK honest
        width = (1.0 + t) ** lam / a
        pts = t + width * np.array([1.0, 4.0, 16.0, 64.0])
        pts = [p for p in pts if p < T]
        body, _ = integrate.quad(lambda s: beta_kernel(sched, s), t, T, points=pts or None,
                                 epsabs=0.0, epsrel=1e-13, limit=400)
    return -(body + tail)


def B_tail_closed_form(sched: DampingSchedule, t):
    """Incomplete-gamma representation of B(t) for lam < 1.

    With m = 1 - lam and w = alpha (1+tau)^m / m,
    integral_t^inf beta = e^{alpha/m} (1/m) (m/alpha)^{1/m} Gamma(1/m, alpha (1+t)^m / m).
    Kept separate from :func:`B_tail` and used as an independent check.
    """
    t_arr = _check_time(t)
    a, lam = sched.alpha, sched.lam
    if lam == 1.0:
        if a <= 1.0:
            raise DomainError("B(t) diverges for lambda = 1 unless alpha > 1")
        return _scalar(-((1.0 + t_arr) ** (1.0 - a)) / (a - 1.0), t)
    m = 1.0 - lam
    s = 1.0 / m
    x = a * (1.0 + t_arr) ** m / m
    # log-space assembly avoids overflow of e^{alpha/m} against the tiny upper gamma
    log_pref = a / m - math.log(m) + s * math.log(m / a) + special.gammaln(s)
    with np.errstate(divide="ignore"):
        val = -np.exp(log_pref + np.log(special.gammaincc(s, x)))
    return _scalar(val, t)


def sandwich_threshold(sched: DampingSchedule, t_max=1e4, n=2000):
    """Smallest scanned time after which |B| <= 2 beta (1+t)^lam / alpha holds.

    Scans a log-spaced grid on [0, t_max]; returns the first grid time from
    which the upper bound holds at every later grid point.
    """
    if sched.lam >= 1.0:
        raise DomainError("sandwich bounds are stated for lambda < 1")
    ts = np.concatenate([[0.0], np.geomspace(1e-3, t_max, n - 1)])
    # one tail evaluation at t_max, then accumulate interval integrals backwards
    nodes, weights = np.polynomial.legendre.leggauss(16)
    mid, half = 0.5 * (ts[1:] + ts[:-1]), 0.5 * np.diff(ts)
    pieces = half * (beta_kernel(sched, mid[:, None] + half[:, None] * nodes) @ weights)
    tail = -B_tail(sched, float(ts[-1]))
    absB = tail + np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    ok = absB <= 2.0 * _tail_lower(sched, ts)
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return 0.0
    if bad[-1] == ts.size - 1:
        raise DomainError("upper sandwich bound not reached on the scanned horizon")
    return float(ts[bad[-1] + 1])
