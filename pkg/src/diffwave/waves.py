"""Diffusion-wave targets (v_bar, u_bar) for each boundary regime.

Every wave obeys the Darcy law p(v_bar)_x = -a(t) u_bar, so only v_bar is
represented and u_bar is always derived from it.  Four representations:

* ``GaussianWave``     explicit solution of the equation linearised at v_+
* ``ParabolicWave``    Dirichlet nonlinear wave, snapshot stack from an implicit solve
* ``SelfSimilarWave``  Neumann wave phi(x / (1+t)^((lam+1)/2)) found by shooting
* ``ConstantWave``     (v_+, 0)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special
from scipy.interpolate import BPoly, CubicSpline
from scipy.linalg import solve_banded

from .correction import Mollifier
from .grid import Grid1D
from .model import B_tail, DampingSchedule, FarFieldState, GammaLaw, PressureLaw
from .tables import read_table, write_table

__all__ = [
    "WaveError",
    "ExtrapolationError",
    "WaveProfile",
    "GaussianWave",
    "ParabolicWave",
    "SelfSimilarWave",
    "ConstantWave",
    "MassBudget",
    "gaussian_linear_wave",
    "build_dirichlet_wave_initdata",
    "dirichlet_wave_grid",
    "dirichlet_diffusion_wave",
    "neumann_selfsimilar_profile",
    "selfsimilar_residual",
    "constant_wave",
    "wave_eval",
    "save_profile",
    "load_profile",
]

WANTS = ("v", "u", "v_x", "v_t")


class WaveError(RuntimeError):
    """Construction of a diffusion wave failed."""


class ExtrapolationError(ValueError):
    """Query time outside the sampled range of a snapshot stack."""


class WaveProfile:
    regime: str
    far_field: FarFieldState
    sched: DampingSchedule
    law: PressureLaw

    def evaluate(self, x, t, want="v"):
        if want not in WANTS:
            raise ValueError(f"unknown wave field {want!r}; expected one of {WANTS}")
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("waves live on x >= 0")
        if t < 0:
            raise ValueError("t must be non-negative")
        if want == "u":
            out = self._u(x, float(t))
        else:
            out = self._eval(x, float(t), want)
        out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    def _u(self, x, t):
        v = self._eval(x, t, "v")
        vx = self._eval(x, t, "v_x")
        return -((1.0 + t) ** self.sched.lam / self.sched.alpha) * self.law.dp_raw(v) * vx

    def cell_average(self, faces, t, want="v"):
        """Exact averages of v_bar or u_bar over the cells bounded by ``faces``.

        The v average differences a primitive in x; the u average differences
        p(v_bar) at the faces, which is exact under the Darcy law.
        """
        faces = np.asarray(faces, dtype=float)
        t = float(t)
        dx = np.diff(faces)
        if want == "v":
            return np.diff(self._primitive(faces, t)) / dx
        if want == "u":
            pf = self.law.p_raw(self._eval(faces, t, "v"))
            return -((1.0 + t) ** self.sched.lam / self.sched.alpha) * np.diff(pf) / dx
        raise ValueError(f"cell averages exist for 'v' and 'u', not {want!r}")

    def _primitive(self, x, t):
        raise NotImplementedError

    def _eval(self, x, t, want):
        raise NotImplementedError


def wave_eval(profile: WaveProfile, x, t, want="v"):
    return profile.evaluate(x, t, want)


@dataclass(frozen=True)
class ConstantWave(WaveProfile):
    far_field: FarFieldState
    sched: DampingSchedule
    law: PressureLaw
    regime: str = "constant"

    def _eval(self, x, t, want):
        if want == "v":
            return np.full_like(x, self.far_field.v_plus)
        return np.zeros_like(x)

    def _u(self, x, t):
        return np.zeros_like(x)

    def _primitive(self, x, t):
        return self.far_field.v_plus * x


def constant_wave(far_field: FarFieldState, law: PressureLaw | None = None,
                  sched: DampingSchedule | None = None) -> ConstantWave:
    return ConstantWave(far_field, sched or DampingSchedule(1.0, 0.0), law or GammaLaw())


@dataclass(frozen=True)
class GaussianWave(WaveProfile):
    """v_+ + delta0 sqrt((lam+1)/(4 pi kappa)) (1+t)^(-(lam+1)/2) exp(-(lam+1) x^2 / (4 kappa (1+t)^(lam+1)))."""

    far_field: FarFieldState
    delta0: float
    sched: DampingSchedule
    law: PressureLaw
    regime: str = "gaussian_linear"

    def evaluate(self, x, t, want="v"):
        # defined on the whole line
        if want not in WANTS:
            raise ValueError(f"unknown wave field {want!r}")
        if t < 0:
            raise ValueError("t must be non-negative")
        x = np.asarray(x, dtype=float)
        out = self._u(x, float(t)) if want == "u" else self._eval(x, float(t), want)
        return float(out) if np.ndim(out) == 0 else out

    def _parts(self, x, t):
        q = self.sched.lam + 1.0
        k = self.far_field.kappa
        T = (1.0 + t) ** q
        amp = self.delta0 * math.sqrt(q / (4.0 * k * math.pi)) * (1.0 + t) ** (-q / 2.0)
        g = amp * np.exp(-q * x * x / (4.0 * k * T))
        return q, k, T, g

    def _eval(self, x, t, want):
        q, k, T, g = self._parts(x, t)
        if want == "v":
            return self.far_field.v_plus + g
        if want == "v_x":
            return -q * x / (2.0 * k * T) * g
        # v_t = kappa (1+t)^lam v_xx
        vxx = (q * q * x * x / (4.0 * k * k * T * T) - q / (2.0 * k * T)) * g
        return k * (1.0 + t) ** self.sched.lam * vxx

    def _u(self, x, t):
        # linearised Darcy law: u = kappa (1+t)^lam v_x
        return self.far_field.kappa * (1.0 + t) ** self.sched.lam * self._eval(x, t, "v_x")

    def _primitive(self, x, t):
        q = self.sched.lam + 1.0
        T = (1.0 + t) ** q
        z = x * np.sqrt(q / (4.0 * self.far_field.kappa * T))
        return self.far_field.v_plus * x + 0.5 * self.delta0 * special.erf(z)

    def cell_average(self, faces, t, want="v"):
        if want != "u":
            return super().cell_average(faces, t, want)
        faces = np.asarray(faces, dtype=float)
        v = self._eval(faces, float(t), "v")
        return self.far_field.kappa * (1.0 + t) ** self.sched.lam * np.diff(v) / np.diff(faces)


def gaussian_linear_wave(far_field: FarFieldState, delta0, sched: DampingSchedule,
                         law: PressureLaw | None = None) -> GaussianWave:
    if sched.lam >= 1.0:
        raise ValueError("the Gaussian diffusion wave is only used for 0 <= lambda < 1")
    return GaussianWave(far_field, float(delta0), sched, law or GammaLaw())


@dataclass(frozen=True)
class MassBudget:
    initial_excess: float
    u_plus: float
    B0: float
    delta0: float

    @property
    def wave_excess(self):
        """Mass of v_bar_0 - v_+; equals initial_excess - u_+ B(0)."""
        return self.initial_excess - self.u_plus * self.B0


def build_dirichlet_wave_initdata(v0, far_field: FarFieldState, sched: DampingSchedule, x,
                                  support=(0.0, np.inf), shape: Mollifier | None = None):
    """Initial wave v_bar_0 = v_+ + c g(x) carrying the mass fixed by the far-field momentum.

    Parameters
    ----------
    v0 : callable
        Initial specific volume; ``v0(x) - v_+`` must be integrable on ``support``.
    x : ndarray or Grid1D
        Points at which v_bar_0 is sampled, or a grid whose exact cell
        averages of the bump are used (the discrete mass is then exact).
    support : (float, float)
        Interval outside which ``v0 == v_+``.
    shape : Mollifier, optional
        Unit-mass bump g; defaults to the bump on [1, 3].

    Returns
    -------
    vbar0 : ndarray
    budget : MassBudget
    """
    g = shape or Mollifier()
    lo, hi = support
    f = lambda y: float(np.asarray(v0(np.asarray(y, dtype=float)))) - far_field.v_plus
    if np.isfinite(hi):
        brk = np.linspace(lo, hi, 17)[1:-1]
        excess, _ = integrate.quad(f, lo, hi, points=brk, epsabs=1e-14, epsrel=1e-12, limit=500)
    else:
        excess, _ = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=500)
    B0 = B_tail(sched, 0.0)
    c = excess - far_field.u_plus * B0
    if isinstance(x, Grid1D):
        edges = g.antiderivative(x.faces)
        vbar0 = far_field.v_plus + c * np.diff(edges) / x.dx
    else:
        vbar0 = far_field.v_plus + c * g.value(np.asarray(x, dtype=float))
    if np.min(vbar0) <= 0:
        raise WaveError("wave amplitude too large: v_bar_0 is not positive")
    return vbar0, MassBudget(float(excess), far_field.u_plus, float(B0), float(2.0 * c))


def dirichlet_wave_grid(far_field: FarFieldState, sched: DampingSchedule, t_end, dx=0.1, widths=8.0):
    """Uniform grid reaching ``widths`` diffusion widths beyond the initial bump at ``t_end``."""
    s_end = float(sched.rescaled_time(t_end))
    L = 3.0 + widths * math.sqrt(2.0 * far_field.kappa * max(s_end, 1.0)) + 2.0
    N = max(16, int(math.ceil(L / dx)))
    return Grid1D(N * dx, N)


class ParabolicWave(WaveProfile):
    """Snapshot stack of the Dirichlet diffusion wave.

    Cubic splines in x (built on demand, even reflection at x = 0), linear
    interpolation in the rescaled time s between snapshots.
    """

    regime = "dirichlet_parabolic"

    def __init__(self, grid: Grid1D, times, snapshots, far_field, law, sched, stats=None):
        self.grid = grid
        self.times = np.asarray(times, dtype=float)
        self.s = np.asarray(sched.rescaled_time(self.times), dtype=float)
        self.snapshots = np.asarray(snapshots, dtype=float)
        self.far_field = far_field
        self.law = law
        self.sched = sched
        self.stats = stats or {}
        if self.snapshots.shape != (self.times.size, grid.N):
            raise ValueError("snapshot stack shape does not match times x grid")
        self._spline = lru_cache(maxsize=8)(self._build_spline)

    def _build_spline(self, k, field):
        x = self.grid.x
        dx = self.grid.dx
        if field == "v":
            y = self.snapshots[k]
        elif field == "primitive":
            # excess over v_+, so the primitive does not grow like v_+ x
            y = self.snapshots[k] - self.far_field.v_plus
        else:
            # dv/ds = -(1/alpha) (p(v))_xx, same ghosts as the solver
            P = self.law.p_raw(self.snapshots[k])
            Pe = np.concatenate([[P[0]], P, [self.law.p_raw(self.far_field.v_plus)]])
            y = -(Pe[2:] - 2.0 * Pe[1:-1] + Pe[:-2]) / (dx * dx) / self.sched.alpha
        edge = self.far_field.v_plus if field == "v" else 0.0
        xs = np.concatenate([-x[2::-1], x, [self.grid.L]])
        ys = np.concatenate([y[2::-1], y, [edge]])
        spline = CubicSpline(xs, ys)
        if field == "primitive":
            return spline.antiderivative()
        return spline

    def _bracket(self, t):
        span = 1e-9 * max(1.0, self.times[-1])
        if t < self.times[0] - span or t > self.times[-1] + span:
            raise ExtrapolationError(
                f"t={t} outside the sampled range [{self.times[0]}, {self.times[-1]}]")
        s = float(self.sched.rescaled_time(min(max(t, self.times[0]), self.times[-1])))
        k = int(np.searchsorted(self.s, s, side="right")) - 1
        k = min(max(k, 0), self.s.size - 1)
        if k == self.s.size - 1 or self.s[k] == s:
            return k, k, 0.0
        w = (s - self.s[k]) / (self.s[k + 1] - self.s[k])
        return k, k + 1, w

    def _eval(self, x, t, want):
        k0, k1, w = self._bracket(t)
        field = "rate" if want == "v_t" else "v"
        nu = 1 if want == "v_x" else 0
        inside = x <= self.grid.L

        def one(k):
            out = self._spline(k, field)(np.where(inside, x, 0.0), nu)
            tail = self.far_field.v_plus if want == "v" else 0.0
            return np.where(inside, out, tail)

        val = one(k0) if w == 0.0 else (1.0 - w) * one(k0) + w * one(k1)
        if want == "v_t":
            val = val * (1.0 + t) ** self.sched.lam  # ds/dt
        return val

    def _primitive(self, x, t):
        k0, k1, w = self._bracket(t)
        L = self.grid.L
        inner = np.minimum(x, L)

        def one(k):
            F = self._spline(k, "primitive")
            return F(inner) - F(0.0)

        val = one(k0) if w == 0.0 else (1.0 - w) * one(k0) + w * one(k1)
        return val + self.far_field.v_plus * x


def dirichlet_diffusion_wave(vbar0, far_field: FarFieldState, law: PressureLaw, sched: DampingSchedule,
                             grid: Grid1D, sample_times, step_ratio=0.01, ds_min=1e-3,
                             newton_tol=1e-10, max_newton=20, startup_steps=4) -> ParabolicWave:
    """Solve v_s = -(1/alpha) p(v)_xx in the rescaled time s on the half-line.

    Cell-centred second-order differences, reflecting ghost at x = 0 (so
    v_x(0) = 0) and p(v_+) pinned beyond x = L.  Crank-Nicolson after
    ``startup_steps`` backward-Euler steps, each implicit stage solved by
    Newton's method with a tridiagonal Jacobian.  Step size grows with s
    as ``ds = step_ratio * s`` (at least ``ds_min``) and is clipped to land
    on every sample time.
    """
    vbar0 = np.asarray(vbar0, dtype=float)
    if vbar0.shape != (grid.N,):
        raise ValueError("initial wave must be sampled on the grid cells")
    if np.min(vbar0) <= 0:
        raise WaveError("initial wave is not positive")
    times = np.asarray(sample_times, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0) or times[0] < 0:
        raise ValueError("sample_times must be non-empty, sorted and non-negative")
    targets = sched.rescaled_time(times)

    alpha = sched.alpha
    dx2 = grid.dx ** 2
    p_inf = law.p_raw(far_field.v_plus)
    N = grid.N

    def lap_p(v):
        P = law.p_raw(v)
        out = np.empty_like(P)
        out[1:-1] = P[2:] - 2.0 * P[1:-1] + P[:-2]
        out[0] = P[1] - P[0]
        out[-1] = p_inf - 2.0 * P[-1] + P[-2]
        return out / dx2

    ab = np.zeros((3, N))
    w = vbar0.copy()
    s = 0.0
    nsteps = 0
    max_iters = 0
    snaps = []
    for target in targets:
        while s < target:
            ds = max(ds_min, step_ratio * s)
            if s + ds >= target or s + 1.5 * ds > target:
                ds = target - s
            theta = 1.0 if nsteps < startup_steps else 0.5
            explicit = (1.0 - theta) * ds / alpha * lap_p(w) if theta < 1.0 else 0.0
            rhs = w - explicit
            wn = w.copy()
            for it in range(1, max_newton + 1):
                R = wn + theta * ds / alpha * lap_p(wn) - rhs
                c = theta * ds / alpha * law.dp_raw(wn) / dx2
                ab[1] = 1.0 - 2.0 * c
                ab[1, 0] = 1.0 - c[0]
                ab[0, 1:] = c[1:]
                ab[2, :-1] = c[:-1]
                delta = solve_banded((1, 1), ab, -R, check_finite=False)
                wn += delta
                if np.min(wn) <= 0:
                    raise WaveError(f"positivity failure in the parabolic solve at s={s + ds:.6g}")
                if np.max(np.abs(delta)) <= newton_tol:
                    break
            else:
                raise WaveError(
                    f"Newton did not converge in {max_newton} iterations at s={s + ds:.6g} "
                    f"(last update {np.max(np.abs(delta)):.3e})")
            max_iters = max(max_iters, it)
            w = wn
            s += ds
            nsteps += 1
        snaps.append(w.copy())
    stats = {"steps": nsteps, "max_newton_iterations": max_iters}
    return ParabolicWave(grid, times, np.array(snaps), far_field, law, sched, stats)


@dataclass(frozen=True)
class SelfSimilarWave(WaveProfile):
    """v_bar(x, t) = phi(x / (1+t)^((lam+1)/2)) tabulated on [0, xi_max]."""

    xi: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    v_boundary: float
    far_field: FarFieldState
    law: PressureLaw
    sched: DampingSchedule
    regime: str = "neumann_selfsimilar"

    def __post_init__(self):
        # quintic Hermite through phi, phi', phi'' (phi'' recovered from the ODE)
        c = 0.5 * self.sched.alpha * (self.sched.lam + 1.0)
        dp = self.law.dp_raw(self.phi)
        d2p = self.law.deriv(self.phi, 2)
        d2phi = (c * self.xi * self.dphi - d2p * self.dphi ** 2) / dp
        ders = np.column_stack([self.phi, self.dphi, d2phi])
        interp = BPoly.from_derivatives(self.xi, ders)
        object.__setattr__(self, "_interp", interp)
        object.__setattr__(self, "_anti", interp.antiderivative())

    @property
    def xi_max(self):
        return float(self.xi[-1])

    def profile(self, xi, nu=0):
        xi = np.asarray(xi, dtype=float)
        inside = xi <= self.xi_max
        val = self._interp(np.where(inside, xi, 0.0), nu)
        tail = self.far_field.v_plus if nu == 0 else 0.0
        return np.where(inside, val, tail)

    def _eval(self, x, t, want):
        h = (1.0 + t) ** ((self.sched.lam + 1.0) / 2.0)
        xi = x / h
        if want == "v":
            return self.profile(xi)
        dphi = self.profile(xi, 1)
        if want == "v_x":
            return dphi / h
        return -0.5 * (self.sched.lam + 1.0) * xi * dphi / (1.0 + t)

    def _primitive(self, x, t):
        h = (1.0 + t) ** ((self.sched.lam + 1.0) / 2.0)
        xi = np.minimum(x / h, self.xi_max)
        inner = h * (self._anti(xi) - self._anti(0.0))
        return inner + self.far_field.v_plus * np.maximum(x - h * self.xi_max, 0.0)


def _profile_rhs(c, law):
    def rhs(xi, y):
        phi, q = y
        dphi = q / law.dp_raw(phi)
        return [dphi, c * xi * dphi]
    return rhs


def neumann_selfsimilar_profile(v_boundary, far_field: FarFieldState, law: PressureLaw,
                                sched: DampingSchedule, xi_max=None, tol=1e-8,
                                table_size=4097) -> SelfSimilarWave:
    """Shoot on phi'(0) for (p(phi))'' = (alpha (lam+1)/2) xi phi' with phi(0)=v_boundary, phi(xi_max)=v_+.

    The ODE is integrated as a first-order system in (phi, q = p(phi)'), and
    the slope is found by bisection inside a bracket grown geometrically
    from the linearised slope (v_+ - v_boundary) sqrt((lam+1)/(pi kappa)).
    """
    if not v_boundary > 0:
        raise ValueError("boundary value must be positive")
    if sched.lam >= 1.0:
        raise ValueError("self-similar waves are built for 0 <= lambda < 1")
    vp, kappa, lam = far_field.v_plus, far_field.kappa, sched.lam
    width = math.sqrt((lam + 1.0) / (4.0 * kappa))
    if xi_max is None:
        xi_max = 12.0 / width
    xi = np.linspace(0.0, xi_max, table_size)
    if v_boundary == vp:
        return SelfSimilarWave(xi, np.full_like(xi, vp), np.zeros_like(xi), float(v_boundary),
                               far_field, law, sched)

    c = 0.5 * sched.alpha * (lam + 1.0)
    rhs = _profile_rhs(c, law)
    lo_v, hi_v = min(v_boundary, vp), max(v_boundary, vp)

    def vacuum(xi_, y):
        return y[0] - 1e-3 * lo_v
    vacuum.terminal = True

    def shoot(slope, dense=False):
        y0 = [v_boundary, law.dp_raw(v_boundary) * slope]
        sol = integrate.solve_ivp(rhs, (0.0, xi_max), y0, method="DOP853", rtol=1e-12,
                                  atol=1e-14 * hi_v, events=vacuum, dense_output=dense)
        if sol.status == 1:
            return -np.inf, sol
        return sol.y[0, -1] - vp, sol

    # F(slope) = phi(xi_max) - v_+ increases with the slope; slope 0 gives phi = v_boundary
    slope_lin = (vp - v_boundary) * math.sqrt((lam + 1.0) / (math.pi * kappa))
    if slope_lin > 0:
        lo, hi = 0.0, slope_lin
        for _ in range(60):
            if shoot(hi)[0] > 0:
                break
            lo, hi = hi, 2.0 * hi
        else:
            raise WaveError("shooting bracket not found (amplitude and xi_max mismatch?)")
    else:
        lo, hi = slope_lin, 0.0
        for _ in range(60):
            if shoot(lo)[0] < 0:
                break
            lo, hi = 2.0 * lo, lo
        else:
            raise WaveError("shooting bracket not found (amplitude and xi_max mismatch?)")

    for _ in range(100):
        mid = 0.5 * (lo + hi)
        f_mid, _ = shoot(mid)
        if abs(f_mid) <= 0.1 * tol or abs(hi - lo) <= 1e-15 * abs(mid):
            break
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    f_mid, sol = shoot(mid, dense=True)
    if not abs(f_mid) <= tol:
        raise WaveError(f"shooting missed the far-field value by {abs(f_mid):.3e}")
    phi, q = sol.sol(xi)
    dphi = q / law.dp_raw(phi)
    steps = np.diff(phi) * math.copysign(1.0, vp - v_boundary)
    if np.any(steps < -1e-3 * tol):
        raise WaveError("shooting produced a non-monotone profile")
    wave = SelfSimilarWave(xi, phi, dphi, float(v_boundary), far_field, law, sched)
    # rounding in the tabulated phi grows with the jump, so large jumps get a proportional budget
    res_tol = tol * max(1.0, 10.0 * abs(v_boundary - vp))
    res = selfsimilar_residual(wave, xi.size)
    if res > res_tol:
        raise WaveError(f"profile ODE residual {res:.3e} exceeds tolerance {res_tol:.1e}")
    return wave


def selfsimilar_residual(wave: SelfSimilarWave, n=None):
    """Max residual of (p(phi))'' - (alpha (lam+1)/2) xi phi' from 4th-order differences.

    Samples the tabulated profile at ``n`` uniform points (default: twice the
    table resolution).
    """
    n = n or 2 * (wave.xi.size - 1) + 1
    xi = np.linspace(0.0, wave.xi_max, n)
    h = xi[1] - xi[0]
    phi = wave.profile(xi)
    P = wave.law.p_raw(phi)
    c = 0.5 * wave.sched.alpha * (wave.sched.lam + 1.0)
    i = np.arange(2, n - 2)
    P2 = (-P[i + 2] + 16 * P[i + 1] - 30 * P[i] + 16 * P[i - 1] - P[i - 2]) / (12 * h * h)
    d1 = (-phi[i + 2] + 8 * phi[i + 1] - 8 * phi[i - 1] + phi[i - 2]) / (12 * h)
    return float(np.max(np.abs(P2 - c * xi[i] * d1)))


def save_profile(profile: WaveProfile, path):
    ff, sc = profile.far_field, profile.sched
    params = {"regime": profile.regime, "v_plus": ff.v_plus, "u_plus": ff.u_plus, "kappa": ff.kappa,
              "alpha": sc.alpha, "lambda": sc.lam}
    if isinstance(profile.law, GammaLaw):
        params["gamma"] = profile.law.gamma
    columns = {}
    if isinstance(profile, GaussianWave):
        params["delta0"] = profile.delta0
    elif isinstance(profile, SelfSimilarWave):
        params["v_boundary"] = profile.v_boundary
        columns = {"xi": profile.xi, "phi": profile.phi, "dphi": profile.dphi}
    elif isinstance(profile, ParabolicWave):
        params["L"] = profile.grid.L
        params["N"] = profile.grid.N
        params["times"] = profile.times
        columns = {"x": profile.grid.x}
        for k in range(profile.times.size):
            columns[f"v{k}"] = profile.snapshots[k]
    write_table(path, "profile", params, columns)


def load_profile(path) -> WaveProfile:
    kind, params, columns = read_table(path)
    if kind != "profile":
        raise ValueError(f"{path}: expected a profile table, found {kind!r}")
    law = GammaLaw(float(params.get("gamma", 1.4)))
    sched = DampingSchedule(float(params["alpha"]), float(params["lambda"]))
    ff = FarFieldState(float(params["v_plus"]), float(params["u_plus"]), float(params["kappa"]))
    regime = params["regime"]
    if regime == "constant":
        return ConstantWave(ff, sched, law)
    if regime == "gaussian_linear":
        return GaussianWave(ff, float(params["delta0"]), sched, law)
    if regime == "neumann_selfsimilar":
        return SelfSimilarWave(columns["xi"], columns["phi"], columns["dphi"],
                               float(params["v_boundary"]), ff, law, sched)
    if regime == "dirichlet_parabolic":
        grid = Grid1D(float(params["L"]), int(params["N"]))
        times = [float(v) for v in params["times"].split(",")]
        snaps = np.array([columns[f"v{k}"] for k in range(len(times))])
        return ParabolicWave(grid, times, snaps, ff, law, sched)
    raise ValueError(f"{path}: unknown regime {regime!r}")
