"""Perturbation fields, weighted energy functionals and decay-rate fitting.

The perturbation of a solution (v, u) from the wave-plus-correction is

    omega(x, t) = -int_x^inf (v - v_bar - v_hat) dy,     z = u - u_bar - u_hat,

and omega_t = z.  The rate tables below give, for each boundary regime and
each lambda, the power of (1+t) that multiplies ||d_x^k omega||^2 and
||d_x^k omega_t||^2 in the energy bounds, together with the allowed growth of
the bound itself.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .correction import CorrectionPair, correction_cell_average
from .grid import Grid1D
from .waves import WaveProfile

__all__ = [
    "RegimeError",
    "UnpredictedQuantity",
    "PerturbationFields",
    "RatePrediction",
    "WeightTerm",
    "FitResult",
    "BoundednessResult",
    "DecayReport",
    "perturbation_fields",
    "norm",
    "predicted_rate",
    "bound_weights",
    "weighted_functionals",
    "weighted_energy_series",
    "fit_decay",
    "boundedness_check",
    "DIRICHLET_CUTOFF",
    "NEUMANN_CUTOFF",
]

DIRICHLET_CUTOFF = 0.6
NEUMANN_CUTOFF = 1.0 / 7.0
DEFAULT_EPS = 0.05
SLOPE_TOL = 0.1
REGIMES = ("dirichlet", "neumann", "neumann_constant")

_WAVES_FOR = {
    "dirichlet": {"dirichlet_parabolic", "gaussian_linear", "constant"},
    "neumann": {"neumann_selfsimilar", "constant"},
}


class RegimeError(ValueError):
    """Wave, correction and boundary condition do not belong together."""


class UnpredictedQuantity(ValueError):
    """No rate is stated for this quantity in this regime."""


@dataclass
class PerturbationFields:
    """omega and z with their spatial derivatives on the cell centres.

    ``omega_derivs[k]`` is d_x^k omega for k = 0..3, ``z_derivs[k]`` is
    d_x^k z for k = 0..2.  ``v_err`` and ``u_err`` are v - v_bar and u - u_bar.
    """

    t: float
    dx: float
    omega_derivs: list
    z_derivs: list
    v_err: np.ndarray
    u_err: np.ndarray

    @property
    def omega(self):
        return self.omega_derivs[0]

    @property
    def z(self):
        return self.z_derivs[0]


def _d1(f, parity, dx):
    """Centred first difference.

    ``parity`` +1 (even) or -1 (odd) sets a mirror ghost at the wall;
    ``None`` uses a one-sided second-order stencil in the wall cell instead.
    The right edge sees a zero ghost.
    """
    g = np.concatenate([[0.0 if parity is None else parity * f[0]], f, [0.0]])
    out = (g[2:] - g[:-2]) / (2.0 * dx)
    if parity is None:
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    return out


def _d2(f, parity, dx):
    g = np.concatenate([[0.0 if parity is None else parity * f[0]], f, [0.0]])
    out = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / (dx * dx)
    if parity is None:
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (dx * dx)
    return out


def reverse_cumulative(d, dx):
    """-int_x^L d, trapezoid between cell centres, half cell to the right edge.

    The centred difference of the result is (d[i-1] + 2 d[i] + d[i+1]) / 4,
    a second-order approximation of d.
    """
    d = np.asarray(d, dtype=float)
    half = 0.5 * dx * (d[:-1] + d[1:])
    tail = np.concatenate([np.cumsum(half[::-1])[::-1], [0.0]])
    return -(tail + 0.5 * dx * d[-1])


def perturbation_fields(state, grid: Grid1D, wave: WaveProfile, corr: CorrectionPair,
                        wall="one_sided") -> PerturbationFields:
    """Fields of the snapshot ``state`` relative to ``wave`` plus ``corr``.

    Parameters
    ----------
    wall : {"one_sided", "parity"}
        Stencil in the wall cell.  ``"parity"`` mirrors the fields (for
        Dirichlet omega_x even and z odd, for Neumann omega_x odd and z
        even); ``"one_sided"`` uses interior points only.  The mirror is exact
        only when the scheme's wall cell is; any O(dx^2) offset there becomes
        an O(1) spike in the second differences.

    All fields vanish beyond the right edge.
    """
    if wall not in ("one_sided", "parity"):
        raise ValueError(f"unknown wall stencil {wall!r}")
    regime = corr.regime
    if wave.regime not in _WAVES_FOR[regime]:
        raise RegimeError(f"a {wave.regime!r} wave does not belong to the {regime} problem")
    x, dx, t = grid.x, grid.dx, float(state.t)
    if state.v.shape != x.shape:
        raise ValueError("snapshot does not live on this grid")
    # the solver state holds cell averages, so compare with exact cell averages;
    # point quadrature on coarse far-field cells shows up as spurious mass
    faces = grid.faces
    vbar = wave.cell_average(faces, t, "v")
    ubar = wave.cell_average(faces, t, "u")
    d = state.v - vbar - correction_cell_average(corr, faces, t, "v")
    z = state.u - ubar - correction_cell_average(corr, faces, t, "u")
    pd, pz = (1.0, -1.0) if regime == "dirichlet" else (-1.0, 1.0)
    if wall == "one_sided":
        pd = pz = None
    omega = reverse_cumulative(d, dx)
    omega_derivs = [omega, d, _d1(d, pd, dx), _d2(d, pd, dx)]
    z_derivs = [z, _d1(z, pz, dx), _d2(z, pz, dx)]
    return PerturbationFields(t, dx, omega_derivs, z_derivs, state.v - vbar, state.u - ubar)


def norm(values, grid, which="L2"):
    """Discrete L1 (dx-weighted), L2 (sqrt(dx)-weighted) or Linf norm.

    ``grid`` may be a :class:`Grid1D` or the spacing itself.
    """
    f = np.asarray(values, dtype=float)
    dx = grid.dx if isinstance(grid, Grid1D) else float(grid)
    if which == "L2":
        return float(math.sqrt(dx * np.dot(f, f)))
    if which == "L1":
        return float(dx * np.sum(np.abs(f)))
    if which in ("Linf", "inf"):
        return float(np.max(np.abs(f))) if f.size else 0.0
    raise ValueError(f"unknown norm {which!r}")


# ---------------------------------------------------------------- rate tables

@dataclass(frozen=True)
class RatePrediction:
    regime: str
    quantity: str
    lam: float
    exponent: float
    epsilon_slack: float = 0.0
    k: int | None = None


@dataclass(frozen=True)
class WeightTerm:
    """One term of an energy bound.

    ``weight`` multiplies ||d_x^k field||^2 (inside the time integral for
    integrated terms); the whole term may grow like (1+t)^growth.
    """

    name: str
    field: str
    k: int
    weight: float
    integrated: bool = False
    growth: float = 0.0


def _check_lambda(lam):
    if lam == 1.0:
        raise ValueError("lambda = 1 lies outside the supported range [0, 1)")
    if not 0.0 <= lam < 1.0:
        raise ValueError("lambda must lie in [0, 1)")


def _branch(regime, lam):
    """'sub', 'crit' or 'super' for the regime's cut-off."""
    if regime == "neumann_constant":
        return "sub"
    cut = DIRICHLET_CUTOFF if regime == "dirichlet" else NEUMANN_CUTOFF
    if math.isclose(lam, cut, rel_tol=0.0, abs_tol=1e-12):
        return "crit"
    return "sub" if lam < cut else "super"


def _default_b(regime, lam):
    lo = (1.5 - 1.5 * lam) if regime == "dirichlet" else (0.5 - 2.5 * lam)
    return 0.5 * (lo + lam)


def b_interval(regime, lam):
    """Open interval for the integrated-bound exponent b above the cut-off."""
    lo = (1.5 - 1.5 * lam) if regime == "dirichlet" else (0.5 - 2.5 * lam)
    return lo, lam


def bound_weights(regime, lam, b=None, eps=DEFAULT_EPS):
    """Weight table of the energy bound that applies to (regime, lam).

    Returns ``(label, terms)`` where ``label`` is one of ``"sub"``,
    ``"crit"``, ``"super"`` and ``terms`` is a list of :class:`WeightTerm`.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    _check_lambda(lam)
    q = lam + 1.0
    branch = _branch(regime, lam)
    terms = []
    if branch in ("sub", "crit"):
        if branch == "crit":
            q = 8.0 / 5.0 if regime == "dirichlet" else 8.0 / 7.0
        g = eps if branch == "crit" else 0.0
        for k in range(4):
            terms.append(WeightTerm(f"omega_{k}", "omega", k, q * k, False, g))
        for k in range(3):
            terms.append(WeightTerm(f"omegat_{k}", "omegat", k, q * k + 2.0, False, g))
        for j in range(1, 4):
            terms.append(WeightTerm(f"int_omega_{j}", "omega", j, q * j - 1.0, True, g))
        for j in range(3):
            terms.append(WeightTerm(f"int_omegat_{j}", "omegat", j, q * j + 1.0, True, g))
        return branch, terms
    if regime == "dirichlet":
        shift, growth0 = 1.5 - 2.5 * lam, 1.5 * lam - 1.5
    else:
        shift, growth0 = 0.5 - 3.5 * lam, 2.5 * lam - 0.5
    if b is None:
        b = _default_b(regime, lam)
    lo, hi = b_interval(regime, lam)
    if not lo < b < hi:
        raise ValueError(f"b={b} outside the admissible interval ({lo:.6g}, {hi:.6g})")
    for k in range(4):
        terms.append(WeightTerm(f"omega_{k}", "omega", k, q * k + shift))
    for k in range(3):
        terms.append(WeightTerm(f"omegat_{k}", "omegat", k, q * k + shift + 2.0))
    for j in range(4):
        terms.append(WeightTerm(f"int_omega_{j}", "omega", j, q * (j - 1) + b, True, b + growth0))
    for j in range(3):
        terms.append(WeightTerm(f"int_omegat_{j}", "omegat", j, q * j + b - lam + 1.0, True, b + growth0))
    return branch, terms


def predicted_rate(regime, quantity, lam, k=None, eps=DEFAULT_EPS) -> RatePrediction:
    """Predicted decay power of (1+t) for a norm (not its square).

    ``quantity`` is ``"v_Linf"``, ``"u_Linf"``, ``"omega_k_L2"`` or
    ``"omegat_k_L2"`` (the last two need ``k``).  L-infinity rates exist for
    the Dirichlet problem only.  At a critical lambda the nominal exponent is
    returned and the bound only guarantees ``exponent - epsilon_slack``.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    _check_lambda(lam)
    if quantity in ("v_Linf", "u_Linf"):
        if regime != "dirichlet":
            raise UnpredictedQuantity(f"no L-infinity rate is stated for the {regime} problem")
        branch = _branch(regime, lam)
        if quantity == "v_Linf":
            table = {"sub": 0.75 * (lam + 1.0), "crit": 1.2, "super": 0.5 * (3.0 - lam)}
        else:
            table = {"sub": 0.25 * (lam + 5.0), "crit": 1.4, "super": 2.0 - lam}
        slack = eps if branch == "crit" else 0.0
        return RatePrediction(regime, quantity, lam, table[branch], slack)
    if quantity not in ("omega_k_L2", "omegat_k_L2"):
        raise ValueError(f"unknown quantity {quantity!r}")
    kmax = 3 if quantity == "omega_k_L2" else 2
    if k is None or not 0 <= k <= kmax:
        raise ValueError(f"{quantity} needs 0 <= k <= {kmax}")
    branch, terms = bound_weights(regime, lam, eps=eps)
    fld = "omega" if quantity == "omega_k_L2" else "omegat"
    term = next(t for t in terms if not t.integrated and t.field == fld and t.k == k)
    # ||.||^2 <= C (1+t)^(growth - weight); at the cut-off the growth is the eps slack
    if branch == "crit":
        return RatePrediction(regime, quantity, lam, 0.5 * term.weight, 0.5 * term.growth, k)
    return RatePrediction(regime, quantity, lam, 0.5 * (term.weight - term.growth), 0.0, k)


# ---------------------------------------------------------------- functionals

def weighted_functionals(times, sq_norms, regime, lam, b=None, eps=DEFAULT_EPS):
    """Apply the weight table to squared-norm series.

    Parameters
    ----------
    times : array
        Sample times, increasing, starting at 0 for the integrated terms to
        be meaningful.
    sq_norms : dict
        ``("omega", k)`` and ``("omegat", k)`` mapped to arrays of
        ||d_x^k .||^2 at ``times``.

    Returns
    -------
    dict
        term name -> ``(WeightTerm, series)``.  Integrated terms are
        cumulative trapezoid integrals over the sampled times.
    """
    t = np.asarray(times, dtype=float)
    _, terms = bound_weights(regime, lam, b=b, eps=eps)
    out = {}
    for term in terms:
        n2 = np.asarray(sq_norms[(term.field, term.k)], dtype=float)
        w = (1.0 + t) ** term.weight * n2
        if term.integrated:
            w = cumulative_trapezoid(w, t, initial=0.0)
        out[term.name] = (term, w)
    return out


def weighted_energy_series(trajectory, wave, corr, regime=None, b=None, eps=DEFAULT_EPS):
    """Squared norms and weighted functionals along a solver trajectory.

    Returns ``(sq_norms, functionals)`` as described in
    :func:`weighted_functionals`.
    """
    sched = trajectory.config.sched
    if regime is None:
        regime = corr.regime
        if regime == "neumann" and wave.regime == "constant":
            regime = "neumann_constant"
    sq = {("omega", k): [] for k in range(4)}
    sq.update({("omegat", k): [] for k in range(3)})
    for i in range(trajectory.times.size):
        f = perturbation_fields(trajectory.state(i), trajectory.grid, wave, corr)
        for k in range(4):
            sq[("omega", k)].append(norm(f.omega_derivs[k], f.dx) ** 2)
        for k in range(3):
            sq[("omegat", k)].append(norm(f.z_derivs[k], f.dx) ** 2)
    sq = {key: np.array(val) for key, val in sq.items()}
    return sq, weighted_functionals(trajectory.times, sq, regime, sched.lam, b=b, eps=eps)


# ---------------------------------------------------------------- fitting

@dataclass(frozen=True)
class FitResult:
    exponent: float
    r2: float
    count: int
    window: tuple


def fit_decay(times, values, window=None, min_samples=8) -> FitResult:
    """Least-squares fit of log(value) against log(1+t); exponent = -slope."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if window is not None:
        lo, hi = window
        mask = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
        t, y = t[mask], y[mask]
    if t.size < min_samples:
        raise ValueError(f"need at least {min_samples} samples in the fit window, got {t.size}")
    if np.any(~(y > 0)):
        raise ValueError("non-positive values in the fit window (floating-point floor?)")
    X, Y = np.log1p(t), np.log(y)
    A = np.column_stack([X, np.ones_like(X)])
    (slope, icpt), *_ = np.linalg.lstsq(A, Y, rcond=None)
    resid = Y - (slope * X + icpt)
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot <= 1e-30 * max(1.0, float(np.sum(Y * Y))) else 1.0 - ss_res / ss_tot
    return FitResult(float(-slope), float(r2), int(t.size), (float(t[0]), float(t[-1])))


@dataclass(frozen=True)
class BoundednessResult:
    supremum: float
    slope: float
    passed: bool

    @property
    def verdict(self):
        return "PASS" if self.passed else "FAIL"


def boundedness_check(times, values, claimed_exponent, tol=SLOPE_TOL) -> BoundednessResult:
    """Test that (1+t)^claimed * value shows no growth over the final decade of t.

    Zero series pass trivially.  The slope is the least-squares log-log
    slope over the samples with 1+t >= (1+t_max)/10.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    w = (1.0 + t) ** claimed_exponent * y
    sup = float(np.max(w)) if w.size else 0.0
    last = (1.0 + t) >= (1.0 + t[-1]) / 10.0
    tw, ww = t[last], w[last]
    if np.all(ww == 0.0):
        return BoundednessResult(sup, 0.0, True)
    if np.any(~(ww > 0)) or tw.size < 2:
        return BoundednessResult(sup, float("nan"), False)
    slope = float(np.polyfit(np.log1p(tw), np.log(ww), 1)[0])
    return BoundednessResult(sup, slope, slope <= tol)


# ---------------------------------------------------------------- reporting

@dataclass
class DecayReport:
    """Fitted against predicted exponents plus functional boundedness verdicts."""

    regime: str
    lam: float
    config_hash: str = ""
    window: tuple = (0.0, 0.0)
    quantities: dict = field(default_factory=dict)
    functionals: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add_quantity(self, name, fit: FitResult, predicted=None, tolerance=None):
        entry = {"fitted": fit.exponent, "r2": fit.r2, "count": fit.count,
                 "window": list(fit.window), "predicted": predicted}
        if predicted is not None:
            entry["margin"] = fit.exponent - predicted
            if tolerance is not None:
                entry["tolerance"] = tolerance
                entry["verdict"] = "PASS" if abs(fit.exponent - predicted) <= tolerance else "FAIL"
        self.quantities[name] = entry

    def add_functional(self, term: WeightTerm, result: BoundednessResult):
        self.functionals[term.name] = {
            "field": term.field, "k": term.k, "weight": term.weight, "integrated": term.integrated,
            "growth": term.growth, "supremum": result.supremum, "final_decade_slope": result.slope,
            "verdict": result.verdict,
        }

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        return d

    def to_json(self):
        return json.dumps(_finite(self.to_dict()), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        d["window"] = tuple(d["window"])
        return cls(**d)


def _finite(obj):
    # JSON has no NaN; keep reports strict
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def config_digest(obj):
    """SHA-256 of the canonical JSON form of ``obj``."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
