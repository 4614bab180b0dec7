"""Finite-volume solver for the damped p-system on a truncated half-line.

    v_t - u_x = 0,
    u_t + p(v)_x = -a(t) u,        0 < x < L,

with u(0, t) = 0 (Dirichlet) or u_x(0, t) = 0 (Neumann) at the wall and the
far-field state (v_+, u_+ beta(t)) imposed through a ghost cell at x = L.

The damping is linear in u, so it is integrated exactly and Strang-split
around the hyperbolic update.  The hyperbolic part is a MUSCL reconstruction
(minmod or monotonised-central limiter) or a first-order one, with LLF or HLL
fluxes and SSP-RK2 stages.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Grid1D
from .model import DampingSchedule, DomainError, FarFieldState, PressureLaw, beta_kernel
from .tables import read_table, write_table

__all__ = [
    "SolverError",
    "PositivityError",
    "SolverConfig",
    "State",
    "Trajectory",
    "exact_damping_integral",
    "hyperbolic_flux",
    "apply_boundary",
    "step",
    "run",
    "save_snapshot",
    "load_snapshot",
]

BOUNDARIES = ("dirichlet", "neumann")
FLUXES = ("llf", "hll")
RECONSTRUCTIONS = ("first_order", "muscl_minmod", "muscl_mc")
N_GHOST = 2


class SolverError(RuntimeError):
    """A run could not be completed."""


class PositivityError(SolverError):
    """Specific volume reached zero or became invalid."""

    def __init__(self, cell, t):
        super().__init__(f"vacuum or invalid state in cell {cell} at t={t:.10g}")
        self.cell = int(cell)
        self.t = float(t)


@dataclass(frozen=True)
class SolverConfig:
    """Everything a run needs besides the initial data.

    ``v_boundary`` is the pinned wall value v(0, t) = v0(0) used by the
    Neumann ghost; :func:`run` fills it from the initial data when omitted.
    """

    law: PressureLaw
    sched: DampingSchedule
    far_field: FarFieldState
    grid: Grid1D
    boundary: str = "dirichlet"
    cfl: float = 0.45
    t_end: float = 1.0
    sample_times: tuple = ()
    flux: str = "llf"
    reconstruction: str = "muscl_mc"
    v_boundary: float | None = None

    def __post_init__(self):
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.flux not in FLUXES:
            raise ValueError(f"flux must be one of {FLUXES}, got {self.flux!r}")
        if self.reconstruction not in RECONSTRUCTIONS:
            raise ValueError(f"reconstruction must be one of {RECONSTRUCTIONS}, got {self.reconstruction!r}")
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        ts = np.asarray(self.sample_times, dtype=float)
        if ts.size and (np.any(np.diff(ts) <= 0) or ts[0] < 0 or ts[-1] > self.t_end):
            raise ValueError("sample_times must be strictly increasing inside [0, t_end]")
        object.__setattr__(self, "sample_times", tuple(float(s) for s in ts))
        if self.v_boundary is not None and not self.v_boundary > 0:
            raise ValueError("the pinned wall volume must be positive")


@dataclass
class State:
    v: np.ndarray
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.v.shape != self.u.shape or self.v.ndim != 1:
            raise ValueError("v and u must be 1-D arrays of equal length")
        bad = np.nonzero(~(self.v > 0))[0]
        if bad.size:
            raise PositivityError(bad[0], self.t)

    def copy(self):
        return State(self.v.copy(), self.u.copy(), self.t)


@dataclass
class Trajectory:
    """Snapshots at the sample times plus per-step diagnostics.

    ``mass[k]`` is the discrete integral of v at ``times[k]`` and
    ``inflow[k]`` the time-integrated boundary flux u(L) - u(0) up to then,
    so ``mass - inflow`` is constant up to rounding.
    """

    grid: Grid1D
    config: SolverConfig
    times: np.ndarray
    v: np.ndarray
    u: np.ndarray
    mass: np.ndarray
    inflow: np.ndarray
    dt: np.ndarray
    min_v: np.ndarray
    cfl_max: float
    final: State
    monitor: list = field(default_factory=list)

    def state(self, k):
        return State(self.v[k], self.u[k], float(self.times[k]))


def exact_damping_integral(sched: DampingSchedule, t0, t1):
    """Integral of alpha/(1+s)^lam over [t0, t1]."""
    if not 0 <= t0 <= t1:
        raise ValueError("need 0 <= t0 <= t1")
    return sched.integral(t0, t1)


def hyperbolic_flux(vL, uL, vR, uR, law: PressureLaw, flux_kind="llf"):
    """Numerical flux for f(v, u) = (-u, p(v)).

    LLF uses s_max = max(c(vL), c(vR)).  HLL uses the Davis estimates
    s_L = -s_max, s_R = +s_max; the system's characteristic speeds are
    symmetric, so the two fluxes agree, but HLL is coded from its own
    formula so the agreement is a real check.
    """
    vL, uL, vR, uR = (np.asarray(a, dtype=float) for a in (vL, uL, vR, uR))
    if np.any(~(vL > 0)) or np.any(~(vR > 0)):
        raise DomainError("vacuum state passed to the flux")
    return _flux(vL, uL, vR, uR, law, flux_kind)


def _flux(vL, uL, vR, uR, law, flux_kind):
    pL, pR = law.p_raw(vL), law.p_raw(vR)
    cL, cR = np.sqrt(-law.dp_raw(vL)), np.sqrt(-law.dp_raw(vR))
    smax = np.maximum(cL, cR)
    if flux_kind == "llf":
        Fv = 0.5 * (-uL - uR) - 0.5 * smax * (vR - vL)
        Fu = 0.5 * (pL + pR) - 0.5 * smax * (uR - uL)
    elif flux_kind == "hll":
        sL, sR = -smax, smax
        inv = 1.0 / (sR - sL)
        Fv = (sR * -uL - sL * -uR + sL * sR * (vR - vL)) * inv
        Fu = (sR * pL - sL * pR + sL * sR * (uR - uL)) * inv
    else:
        raise ValueError(f"unknown flux {flux_kind!r}")
    return Fv, Fu


def apply_boundary(state: State, config: SolverConfig, t=None, n_ghost=1):
    """Ghost values at both ends.

    Returns ``((v_left, u_left), (v_right, u_right))``; with ``n_ghost > 1``
    each entry is an array ordered outward-in on the left (ghost nearest
    the wall last) and inward-out on the right.
    """
    t = state.t if t is None else t
    v, u = state.v, state.u
    m = n_ghost
    inner_v, inner_u = v[m - 1::-1], u[m - 1::-1]
    if config.boundary == "dirichlet":
        gv, gu = inner_v.copy(), -inner_u
    else:
        vb = _wall_value(config)
        gv, gu = 2.0 * vb - inner_v, inner_u.copy()
    ff = config.far_field
    rv = np.full(m, ff.v_plus)
    ru = np.full(m, ff.u_plus * beta_kernel(config.sched, t))
    if m == 1:
        return (float(gv[0]), float(gu[0])), (float(rv[0]), float(ru[0]))
    return (gv, gu), (rv, ru)


def _wall_value(config):
    if config.v_boundary is None:
        raise SolverError("the Neumann ghost needs the pinned wall value v0(0)")
    return config.v_boundary


def _extend(v, u, t, config):
    (lv, lu), (rv, ru) = _ghosts(v, u, t, config)
    return np.concatenate([lv, v, rv]), np.concatenate([lu, u, ru])


def _ghosts(v, u, t, config):
    # same rule as apply_boundary, without State validation on the hot path
    if config.boundary == "dirichlet":
        lv, lu = v[N_GHOST - 1::-1], -u[N_GHOST - 1::-1]
    else:
        lv, lu = 2.0 * config.v_boundary - v[N_GHOST - 1::-1], u[N_GHOST - 1::-1]
    ff = config.far_field
    rv = np.full(N_GHOST, ff.v_plus)
    ru = np.full(N_GHOST, ff.u_plus * beta_kernel(config.sched, t))
    return (lv, lu), (rv, ru)


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _mc(a, b):
    return _minmod(_minmod(2.0 * a, 2.0 * b), 0.5 * (a + b))


def _face_fluxes(v, u, t, config):
    """Numerical fluxes at the N+1 faces of the grid."""
    ve, ue = _extend(v, u, t, config)
    if config.reconstruction != "first_order":
        c = slice(1, -1)
        limiter = _minmod if config.reconstruction == "muscl_minmod" else _mc
        sv = limiter(ve[c] - ve[:-2], ve[2:] - ve[c])
        su = limiter(ue[c] - ue[:-2], ue[2:] - ue[c])
        if config.reconstruction == "muscl_mc":
            # The mirror ghost makes x = 0 an extremum of the even field, where any
            # limiter clips the wall-cell slope and leaves an O(dx) flux defect.
            # Use the centred slope there and give the ghost its mirror image.
            i = N_GHOST - 1
            sv[i] = 0.5 * (ve[i + 2] - ve[i])
            su[i] = 0.5 * (ue[i + 2] - ue[i])
            parity = -1.0 if config.boundary == "dirichlet" else 1.0
            sv[i - 1] = parity * sv[i]
            su[i - 1] = -parity * su[i]
        vc, uc = ve[c], ue[c]
        vL, vR = vc[:-1] + 0.5 * sv[:-1], vc[1:] - 0.5 * sv[1:]
        uL, uR = uc[:-1] + 0.5 * su[:-1], uc[1:] - 0.5 * su[1:]
    else:
        vL, vR = ve[1:-2], ve[2:-1]
        uL, uR = ue[1:-2], ue[2:-1]
    if np.any(~(vL > 0)) or np.any(~(vR > 0)):
        bad = np.nonzero(~((vL > 0) & (vR > 0)))[0][0]
        raise PositivityError(max(bad - 1, 0), t)
    return _flux(vL, uL, vR, uR, config.law, config.flux)


def _rhs(v, u, t, config):
    Fv, Fu = _face_fluxes(v, u, t, config)
    dx = config.grid.dx
    # boundary inflow of mass: -(Fv[N] - Fv[0]) = u(L) - u(0)
    return -(Fv[1:] - Fv[:-1]) / dx, -(Fu[1:] - Fu[:-1]) / dx, -(Fv[-1] - Fv[0])


def _check_positive(v, t):
    bad = np.nonzero(~(v > 0))[0]
    if bad.size:
        raise PositivityError(bad[0], t)


def max_signal_speed(state: State, config: SolverConfig):
    v = state.v
    c = np.sqrt(-config.law.dp_raw(v)).max()
    if config.boundary == "neumann":
        vg = 2.0 * _wall_value(config) - v[:N_GHOST]
        if np.any(~(vg > 0)):
            raise PositivityError(0, state.t)
        c = max(c, np.sqrt(-config.law.dp_raw(vg)).max())
    return max(c, math.sqrt(-config.law.dp_raw(config.far_field.v_plus)))


def stable_dt(state: State, config: SolverConfig):
    return config.cfl * config.grid.dx / max_signal_speed(state, config)


def step(state: State, config: SolverConfig, dt=None, _inflow=None):
    """Advance one Strang-split step; ``dt`` defaults to the CFL limit."""
    if dt is None:
        dt = stable_dt(state, config)
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0 = state.t
    sched = config.sched
    v = state.v
    u = state.u * math.exp(-sched.integral(t0, t0 + 0.5 * dt))
    th = t0 + 0.5 * dt  # far-field ghost sampled at the midpoint of the hyperbolic stage
    if config.reconstruction != "first_order":
        a, b, q0 = _rhs(v, u, th, config)
        v1, u1 = v + dt * a, u + dt * b
        _check_positive(v1, t0 + dt)
        a, b, q1 = _rhs(v1, u1, th, config)
        v_new = 0.5 * (v + v1 + dt * a)
        u_new = 0.5 * (u + u1 + dt * b)
        inflow = 0.5 * dt * (q0 + q1)
    else:
        a, b, q0 = _rhs(v, u, th, config)
        v_new, u_new = v + dt * a, u + dt * b
        inflow = dt * q0
    _check_positive(v_new, t0 + dt)
    u_new *= math.exp(-sched.integral(th, t0 + dt))
    if _inflow is not None:
        _inflow.append(inflow)
    out = State.__new__(State)
    out.v, out.u, out.t = v_new, u_new, t0 + dt
    return out


def _initial_arrays(initial, config):
    grid = config.grid
    v0, u0 = initial
    if callable(v0):
        v = grid.cell_averages(v0)
    else:
        v = np.asarray(v0, dtype=float).copy()
    if callable(u0):
        u = grid.cell_averages(u0)
    else:
        u = np.asarray(u0, dtype=float).copy()
    if v.shape != (grid.N,) or u.shape != (grid.N,):
        raise ValueError("initial arrays must match the grid")
    return v, u


def _check_compatibility(initial, config, tol=1e-8):
    v0, u0 = initial
    if not callable(u0):
        return
    if config.boundary == "dirichlet":
        if abs(float(u0(np.array(0.0)))) > tol:
            raise ValueError("Dirichlet data must satisfy u0(0) = 0")
    else:
        h = 1e-4
        slope = (-3 * u0(np.array(0.0)) + 4 * u0(np.array(h)) - u0(np.array(2 * h))) / (2 * h)
        if abs(float(slope)) > 1e-5:
            raise ValueError("Neumann data must satisfy u0'(0) = 0")


def run(initial, config: SolverConfig, monitor=None) -> Trajectory:
    """Integrate from t = 0 to ``config.t_end``.

    Parameters
    ----------
    initial : (v0, u0)
        Callables (sampled as cell averages) or arrays of cell values.
    monitor : callable, optional
        ``monitor(state)`` is called at every sample time; its return values
        are collected in ``Trajectory.monitor``.

    Returns
    -------
    Trajectory
        Snapshots are taken exactly at ``config.sample_times`` (steps are
        clipped to land on them).
    """
    _check_compatibility(initial, config)
    if config.boundary == "neumann" and config.v_boundary is None:
        v0 = initial[0]
        vb = float(v0(np.array(0.0))) if callable(v0) else None
        if vb is None:
            raise SolverError("Neumann runs from arrays need config.v_boundary")
        config = replace(config, v_boundary=vb)
    v, u = _initial_arrays(initial, config)
    state = State(v, u, 0.0)
    grid = config.grid
    dx = grid.dx
    samples = list(config.sample_times) or [config.t_end]

    times, vs, us, mass, inflow = [], [], [], [], []
    dts, minv = [], []
    total_in = 0.0
    cfl_max = 0.0
    mon = []
    fluxes = []

    def record(s):
        times.append(s.t)
        vs.append(s.v.copy())
        us.append(s.u.copy())
        mass.append(float(np.sum(s.v) * dx))
        inflow.append(total_in)
        if monitor is not None:
            mon.append(monitor(s))

    k = 0
    while k < len(samples) and samples[k] <= 0.0:
        record(state)
        k += 1
    stop = config.t_end
    while state.t < stop:
        speed = max_signal_speed(state, config)
        dt = config.cfl * dx / speed
        target = samples[k] if k < len(samples) else stop
        hit = state.t + dt >= target
        if hit:
            dt = target - state.t
        elif state.t + 1.5 * dt > target:
            # split the remainder instead of leaving a sliver step
            dt = 0.5 * (target - state.t)
        state = step(state, config, dt, fluxes)
        if hit:
            state.t = target  # remove accumulated rounding in t
        total_in += fluxes.pop()
        dts.append(dt)
        minv.append(float(state.v.min()))
        cfl_max = max(cfl_max, speed * dt / dx)
        if hit and k < len(samples):
            record(state)
            k += 1
    return Trajectory(grid, config, np.array(times), np.array(vs), np.array(us), np.array(mass),
                      np.array(inflow), np.array(dts), np.array(minv), cfl_max, state, mon)


def save_snapshot(path, state: State, grid: Grid1D, params=None):
    """Write ``# diffwave-snapshot v1`` with columns x v u."""
    head = {"t": float(state.t), "L": grid.L, "N": grid.N}
    head.update(params or {})
    write_table(path, "snapshot", head, {"x": grid.x, "v": state.v, "u": state.u})


def load_snapshot(path):
    """Return ``(state, grid, params)``."""
    kind, params, cols = read_table(path)
    if kind != "snapshot":
        raise ValueError(f"{path}: expected a snapshot table, found {kind!r}")
    grid = Grid1D(float(params["L"]), int(params["N"]))
    return State(cols["v"], cols["u"], float(params["t"])), grid, params
