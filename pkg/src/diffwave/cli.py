"""Batch front end: ``diffwave run | sweep | wave | check``.

A run builds the diffusion wave and correction for one parameter set,
integrates the p-system, measures the perturbation norms at log-spaced
times and writes

* ``resolved_config.json``  every knob with defaults filled in
* ``series.csv``            one row per sample time
* ``report.json``           fitted versus predicted exponents and functional verdicts
* ``plots.gp``              gnuplot script for the decay curves
* ``snapshot_KKK.txt``      optional state dumps

Exit codes: 0 success, 2 configuration error, 3 numerical abort (also used
when ``diffwave check`` finds a failing identity).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import asymptotics as asy
from .correction import CorrectionPair, bump, Mollifier
from .grid import Grid1D
from .model import DampingSchedule, DomainError, FarFieldState, GammaLaw
from .solver import RECONSTRUCTIONS, SolverConfig, SolverError, run, save_snapshot
from .tables import atomic_write_text
from .waves import (WaveError, build_dirichlet_wave_initdata, constant_wave, dirichlet_diffusion_wave,
                    neumann_selfsimilar_profile, save_profile)

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "resolve_config", "run_experiment", "sweep",
           "build_wave", "main"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

SERIES_COLUMNS = ["t", "v_wave_Linf_err", "u_wave_Linf_err", "omega_L2", "omega_x_L2", "omega_xx_L2",
                  "omega_xxx_L2", "z_L2", "z_x_L2", "z_xx_L2", "mass_drift", "min_v"]
V_TOL, U_TOL = 0.2, 0.25
WAVE_MAX_CELLS = 40000

# initial perturbation shapes: peak-one bumps away from the wall
G1_SUPPORT = (2.0, 10.0)
G2_SUPPORT = (3.0, 9.0)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float
    lam: float
    boundary: str
    gamma: float = 1.4
    v_plus: float = 1.0
    u_plus: float = 0.0
    v0_at_0: float | None = None
    amplitude: float = 0.01
    L: float | None = None
    N: int = 8000
    t_end: float = 2000.0
    cfl: float = 0.45
    n_samples: int = 64
    log_spaced: bool = True
    fit_window: tuple = (0.1, 1.0)
    flux: str = "llf"
    reconstruction: str = "muscl_mc"
    output: str = "diffwave_out"
    snapshots: bool = False
    b: float | None = None
    eps: float = asy.DEFAULT_EPS
    wave_dx: float = 0.1

    @property
    def regime(self):
        """'dirichlet', 'neumann' or 'neumann_constant'."""
        if self.boundary == "dirichlet":
            return "dirichlet"
        if self.v0_at_0 is None or self.v0_at_0 == self.v_plus:
            return "neumann_constant"
        return "neumann"

    def to_json_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["fit_window"] = list(self.fit_window)
        d["regime"] = self.regime
        d["L_resolved"] = self.length
        return d

    # derived model objects
    def law(self):
        return GammaLaw(self.gamma)

    def sched(self):
        return DampingSchedule(self.alpha, self.lam)

    def far_field(self):
        return FarFieldState.from_model(self.law(), self.sched(), self.v_plus, self.u_plus)

    def sample_times(self):
        if self.t_end == 0:
            return np.array([0.0])
        if self.log_spaced:
            ts = np.geomspace(1.0, 1.0 + self.t_end, self.n_samples) - 1.0
        else:
            ts = np.linspace(0.0, self.t_end, self.n_samples)
        ts[0], ts[-1] = 0.0, self.t_end
        return ts

    @property
    def length(self):
        return self.L if self.L is not None else auto_length(self)

    def fit_bounds(self):
        lo, hi = self.fit_window
        return lo * self.t_end, hi * self.t_end


_KEYMAP = {f.name: f.name for f in fields(ExperimentConfig)}
_KEYMAP.pop("lam")
_KEYMAP["lambda"] = "lam"
_REQUIRED = ("alpha", "lambda", "boundary")


def _num(d, key, kind=float):
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"key {key!r}: expected a number, got {val!r}")
    if kind is int:
        if float(val) != int(val):
            raise ConfigError(f"key {key!r}: expected an integer, got {val!r}")
        return int(val)
    if not math.isfinite(val):
        raise ConfigError(f"key {key!r}: must be finite")
    return float(val)


def resolve_config(raw: dict) -> ExperimentConfig:
    """Validate a raw JSON object and fill in defaults (``L`` absent or "auto" stays automatic)."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in raw:
        if key not in _KEYMAP:
            raise ConfigError(f"unknown key {key!r}")
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
    kw = {}
    for key in ("alpha", "lambda", "gamma", "v_plus", "u_plus", "amplitude", "t_end", "cfl", "eps", "wave_dx"):
        if key in raw:
            kw[_KEYMAP[key]] = _num(raw, key)
    for key in ("N", "n_samples"):
        if key in raw:
            kw[key] = _num(raw, key, int)
    for key in ("L", "v0_at_0", "b"):
        if key in raw and raw[key] is not None and raw[key] != "auto":
            kw[key] = _num(raw, key)
    for key in ("boundary", "flux", "reconstruction", "output"):
        if key in raw:
            if not isinstance(raw[key], str):
                raise ConfigError(f"key {key!r}: expected a string")
            kw[key] = raw[key]
    for key in ("log_spaced", "snapshots"):
        if key in raw:
            if not isinstance(raw[key], bool):
                raise ConfigError(f"key {key!r}: expected true or false")
            kw[key] = raw[key]
    if "fit_window" in raw:
        fw = raw["fit_window"]
        if not (isinstance(fw, list) and len(fw) == 2):
            raise ConfigError("key 'fit_window': expected [lo, hi] fractions of t_end")
        kw["fit_window"] = (_num({"fit_window": fw[0]}, "fit_window"), _num({"fit_window": fw[1]}, "fit_window"))

    cfg = ExperimentConfig(**kw)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    if not cfg.alpha > 0:
        raise ConfigError("key 'alpha': must be positive")
    if not 0.0 <= cfg.lam < 1.0:
        raise ConfigError(f"key 'lambda': {cfg.lam} outside the supported range [0, 1)")
    if cfg.boundary not in ("dirichlet", "neumann"):
        raise ConfigError("key 'boundary': expected 'dirichlet' or 'neumann'")
    if not 0.0 < cfg.cfl < 1.0:
        raise ConfigError("key 'cfl': must lie in (0, 1)")
    if not cfg.gamma > 0:
        raise ConfigError("key 'gamma': must be positive")
    if not cfg.v_plus > 0:
        raise ConfigError("key 'v_plus': must be positive")
    if cfg.v0_at_0 is not None and not cfg.v0_at_0 > 0:
        raise ConfigError("key 'v0_at_0': must be positive")
    if cfg.v0_at_0 is not None and cfg.boundary == "dirichlet":
        raise ConfigError("key 'v0_at_0': only meaningful for the Neumann problem")
    if cfg.N < 16:
        raise ConfigError("key 'N': need at least 16 cells")
    if cfg.L is not None and not cfg.L > 0:
        raise ConfigError("key 'L': must be positive")
    if not cfg.t_end >= 0:
        raise ConfigError("key 't_end': must be non-negative")
    if cfg.n_samples < 2:
        raise ConfigError("key 'n_samples': need at least 2")
    lo, hi = cfg.fit_window
    if not 0.0 <= lo < hi <= 1.0:
        raise ConfigError("key 'fit_window': need 0 <= lo < hi <= 1")
    if cfg.flux not in ("llf", "hll"):
        raise ConfigError("key 'flux': expected 'llf' or 'hll'")
    if cfg.reconstruction not in RECONSTRUCTIONS:
        raise ConfigError(f"key 'reconstruction': expected one of {', '.join(RECONSTRUCTIONS)}")
    if not cfg.wave_dx > 0:
        raise ConfigError("key 'wave_dx': must be positive")
    if not 0 < cfg.eps < 1:
        raise ConfigError("key 'eps': must lie in (0, 1)")
    if cfg.b is not None:
        if asy._branch(cfg.regime, cfg.lam) != "super":
            raise ConfigError("key 'b': only used above the cut-off")
        lo_b, hi_b = asy.b_interval(cfg.regime, cfg.lam)
        if not lo_b < cfg.b < hi_b:
            raise ConfigError(f"key 'b': must lie in ({lo_b:.6g}, {hi_b:.6g})")
    vmin = _v_min_estimate(cfg)
    if not vmin > 0:
        raise ConfigError("key 'amplitude': initial volume would not stay positive")


def _v_min_estimate(cfg):
    base = min(cfg.v_plus, cfg.v0_at_0 if cfg.v0_at_0 is not None else cfg.v_plus)
    return base - abs(cfg.amplitude)


def auto_length(cfg: ExperimentConfig):
    """Causal horizon plus ten diffusion widths."""
    law = cfg.law()
    c = law.sound_speed(_v_min_estimate(cfg))
    kappa = -law.deriv(cfg.v_plus, 1) / cfg.alpha
    q = cfg.lam + 1.0
    return c * cfg.t_end * 1.05 + 10.0 * math.sqrt(kappa * (1.0 + cfg.t_end) ** q / q)


def output_dir(cfg: ExperimentConfig):
    root = os.environ.get("DIFFWAVE_OUT")
    return os.path.join(root, cfg.output) if root else cfg.output


def config_hash(cfg: ExperimentConfig):
    return asy.config_digest(cfg.to_json_dict())


def parse_config(path, write=True) -> ExperimentConfig:
    """Load, validate and (by default) echo ``resolved_config.json`` into the output directory."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"configuration file {path!r} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    cfg = resolve_config(raw)
    if write:
        write_resolved(cfg)
    return cfg


def write_resolved(cfg):
    out = output_dir(cfg)
    atomic_write_text(os.path.join(out, "resolved_config.json"),
                      json.dumps(cfg.to_json_dict(), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- pipeline

def _peak_one_bump(lo, hi):
    scale = math.e  # bump peaks at exp(-1)
    return lambda x: scale * bump(x, lo, hi)


def initial_data(cfg: ExperimentConfig, wave=None):
    """Callables (v0, u0) of the experiment family.

    Dirichlet: v0 = v_+ + A g1, u0 = u_+ M0 + A g2 (M0 ramps from 0 to 1 on
    [1, 3] so u0(0) = 0).  Neumann: v0 = phi + A g1 with phi the profile at
    t = 0 (just v_+ in the constant case), u0 = u_+ + A g2.
    """
    A = cfg.amplitude
    g1, g2 = _peak_one_bump(*G1_SUPPORT), _peak_one_bump(*G2_SUPPORT)
    if cfg.regime == "dirichlet":
        m0 = Mollifier()
        v0 = lambda x: cfg.v_plus + A * g1(x)
        u0 = lambda x: cfg.u_plus * m0.antiderivative(x) + A * g2(x)
    elif cfg.regime == "neumann_constant":
        v0 = lambda x: cfg.v_plus + A * g1(x)
        u0 = lambda x: cfg.u_plus + A * g2(x)
    else:
        if wave is None:
            raise ValueError("the Neumann family is built on the self-similar profile")
        v0 = lambda x: wave.evaluate(np.abs(x), 0.0, "v") + A * g1(x)
        u0 = lambda x: cfg.u_plus + A * g2(x)
    return v0, u0


def build_wave(cfg: ExperimentConfig, sample_times=None):
    """Diffusion wave and correction pair for the configured regime."""
    law, sched, ff = cfg.law(), cfg.sched(), cfg.far_field()
    times = cfg.sample_times() if sample_times is None else sample_times
    if cfg.regime == "dirichlet":
        v0, _ = initial_data(cfg)
        s_end = float(sched.rescaled_time(cfg.t_end))
        L_w = 3.0 + 8.0 * math.sqrt(2.0 * ff.kappa * max(s_end, 1.0)) + 2.0
        dx = max(cfg.wave_dx, L_w / WAVE_MAX_CELLS)
        N_w = max(16, int(math.ceil(L_w / dx)))
        grid = Grid1D(N_w * dx, N_w)
        vbar0, budget = build_dirichlet_wave_initdata(v0, ff, sched, grid, support=G1_SUPPORT)
        wave = dirichlet_diffusion_wave(vbar0, ff, law, sched, grid, times)
        wave.stats["mass_budget"] = asdict(budget)
        corr = CorrectionPair("dirichlet", cfg.u_plus, sched)
    elif cfg.regime == "neumann_constant":
        wave = constant_wave(ff, law, sched)
        corr = CorrectionPair("neumann", cfg.u_plus, sched, u0_at_0=cfg.u_plus)
    else:
        wave = neumann_selfsimilar_profile(cfg.v0_at_0, ff, law, sched)
        corr = CorrectionPair("neumann", cfg.u_plus, sched, u0_at_0=cfg.u_plus)
    return wave, corr


def _series_row(state, grid, wave, corr):
    f = asy.perturbation_fields(state, grid, wave, corr)
    row = [state.t, asy.norm(f.v_err, grid, "Linf"), asy.norm(f.u_err, grid, "Linf")]
    row += [asy.norm(d, grid, "L2") for d in f.omega_derivs]
    row += [asy.norm(d, grid, "L2") for d in f.z_derivs]
    row += [float(np.sum(f.omega_derivs[1]) * grid.dx), float(state.v.min())]
    return row


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def build_report(cfg: ExperimentConfig, series: dict, extra=None) -> asy.DecayReport:
    """Fit exponents and check the functionals from a ``series`` column dict."""
    t = np.asarray(series["t"])
    window = cfg.fit_bounds()
    report = asy.DecayReport(cfg.regime, cfg.lam, config_hash(cfg), window)
    report.meta.update(extra or {})

    def fit(name, col, pred, tol):
        try:
            res = asy.fit_decay(t, series[col], window)
        except ValueError as exc:
            report.quantities[name] = {"error": str(exc), "predicted": pred}
            return
        report.add_quantity(name, res, pred, tol)

    for name, col, tol in (("v_Linf", "v_wave_Linf_err", V_TOL), ("u_Linf", "u_wave_Linf_err", U_TOL)):
        try:
            pred = asy.predicted_rate(cfg.regime, name, cfg.lam, eps=cfg.eps).exponent
        except asy.UnpredictedQuantity:
            pred, tol = None, None
        fit(name, col, pred, tol)
    for k, col in enumerate(["omega_L2", "omega_x_L2", "omega_xx_L2", "omega_xxx_L2"]):
        fit(f"omega_{k}_L2", col, asy.predicted_rate(cfg.regime, "omega_k_L2", cfg.lam, k, cfg.eps).exponent, None)
    for k, col in enumerate(["z_L2", "z_x_L2", "z_xx_L2"]):
        fit(f"omegat_{k}_L2", col, asy.predicted_rate(cfg.regime, "omegat_k_L2", cfg.lam, k, cfg.eps).exponent, None)

    cols = {("omega", 0): "omega_L2", ("omega", 1): "omega_x_L2", ("omega", 2): "omega_xx_L2",
            ("omega", 3): "omega_xxx_L2", ("omegat", 0): "z_L2", ("omegat", 1): "z_x_L2",
            ("omegat", 2): "z_xx_L2"}
    sq = {key: np.asarray(series[c]) ** 2 for key, c in cols.items()}
    branch, _ = asy.bound_weights(cfg.regime, cfg.lam, cfg.b, cfg.eps)
    report.meta["weight_table"] = branch
    if t.size >= 2:
        for name, (term, values) in asy.weighted_functionals(t, sq, cfg.regime, cfg.lam, cfg.b, cfg.eps).items():
            report.add_functional(term, asy.boundedness_check(t, values, -term.growth))
    return report


def _plot_script(cfg, report):
    lines = [
        "# gnuplot script: log-log decay of the perturbation norms",
        "set datafile separator ','",
        "set logscale xy",
        "set key outside",
        "set xlabel '1+t'",
        "set terminal pngcairo size 1000,700",
        "set output 'decay.png'",
    ]
    guides = []
    plots = []
    for name, col in (("v_Linf", 2), ("u_Linf", 3)):
        plots.append(f"'series.csv' using (1+$1):{col} every ::1 with linespoints title '{name}'")
        pred = report.quantities.get(name, {}).get("predicted")
        if pred is not None:
            v_end = report.meta.get(f"{name}_final")
            if v_end:
                tend = 1.0 + cfg.t_end
                guides.append(f"{v_end!r}*(x/{tend!r})**(-{pred!r}) dashtype 2 title 'slope -{pred:.4g}'")
    for name, col in (("omega_x_L2", 5), ("z_L2", 8)):
        plots.append(f"'series.csv' using (1+$1):{col} every ::1 with lines title '{name}'")
    lines.append("plot " + ", \\\n     ".join(plots + guides))
    return "\n".join(lines) + "\n"


def run_experiment(cfg: ExperimentConfig) -> asy.DecayReport:
    """Full pipeline for one configuration; artifacts go to :func:`output_dir`."""
    out = output_dir(cfg)
    os.makedirs(out, exist_ok=True)
    marker = os.path.join(out, "ABORTED")
    if os.path.exists(marker):
        os.unlink(marker)
    write_resolved(cfg)
    times = cfg.sample_times()
    rows = []
    header = SERIES_COLUMNS
    try:
        wave, corr = build_wave(cfg, times)
        v0, u0 = initial_data(cfg, wave)
        grid = Grid1D(cfg.length, cfg.N)
        scfg = SolverConfig(cfg.law(), cfg.sched(), cfg.far_field(), grid, cfg.boundary, cfg.cfl, cfg.t_end,
                            tuple(times), cfg.flux, cfg.reconstruction,
                            v_boundary=float(v0(np.array(0.0))) if cfg.boundary == "neumann" else None)

        def monitor(state):
            rows.append(_series_row(state, grid, wave, corr))
            if cfg.snapshots:
                save_snapshot(os.path.join(out, f"snapshot_{len(rows) - 1:03d}.txt"), state, grid,
                              {"config_hash": config_hash(cfg)})

        traj = run((v0, u0), scfg, monitor=monitor)
    except (SolverError, WaveError, DomainError, FloatingPointError) as exc:
        atomic_write_text(os.path.join(out, "series.csv"), _csv_text(header, rows))
        atomic_write_text(marker, f"{type(exc).__name__}: {exc}\n")
        raise
    atomic_write_text(os.path.join(out, "series.csv"), _csv_text(header, rows))
    series = {name: np.array([r[j] for r in rows]) for j, name in enumerate(header)}
    v0_l1 = float(np.sum(np.abs(traj.v[0] - cfg.v_plus)) * grid.dx)
    extra = {
        "steps": int(traj.dt.size), "cfl_max": traj.cfl_max, "min_v": float(traj.min_v.min()) if traj.dt.size else
        float(traj.v[0].min()), "v0_minus_vplus_L1": v0_l1,
        "max_abs_mass_drift": float(np.max(np.abs(series["mass_drift"]))),
        "discrete_mass_balance": float(np.max(np.abs((traj.mass - traj.inflow) - (traj.mass[0] - traj.inflow[0])))),
        "v_Linf_final": float(series["v_wave_Linf_err"][-1]), "u_Linf_final": float(series["u_wave_Linf_err"][-1]),
        "L": cfg.length, "N": cfg.N,
    }
    report = build_report(cfg, series, extra)
    atomic_write_text(os.path.join(out, "report.json"), report.to_json())
    script = _plot_script(cfg, report)
    _check_script_files(script, out)
    atomic_write_text(os.path.join(out, "plots.gp"), script)
    return report


def _check_script_files(script, out):
    for token in script.split("'"):
        if token.endswith(".csv") and not os.path.exists(os.path.join(out, token)):
            raise RuntimeError(f"plot script references missing file {token}")


# ---------------------------------------------------------------- sweep

def _sweep_one(args):
    cfg_dict, lam = args
    cfg = ExperimentConfig(**cfg_dict)
    try:
        report = run_experiment(cfg)
    except Exception as exc:  # recorded, sweep continues
        return lam, None, f"{type(exc).__name__}: {exc}"
    return lam, report.to_dict(), ""


SWEEP_COLUMNS = ["lambda", "v_fitted", "v_predicted", "v_margin", "u_fitted", "u_predicted", "u_margin",
                 "v_r2", "u_r2", "status"]


def sweep(cfg: ExperimentConfig, lambdas, jobs=1):
    """One experiment per lambda, run concurrently; writes sweep.csv and sweep.gp.

    Returns the list of rows written to ``sweep.csv``.
    """
    lambdas = sorted(float(x) for x in lambdas)
    for lam in lambdas:
        if not 0.0 <= lam < 1.0:
            raise ConfigError(f"sweep lambda {lam} outside the supported range [0, 1)")
    out = output_dir(cfg)
    tasks = []
    for lam in lambdas:
        sub = replace(cfg, lam=lam, output=os.path.join(cfg.output, f"lambda_{lam:.4f}"))
        _validate(sub)
        d = asdict(sub)
        tasks.append((d, lam))
    results = []
    if tasks:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_sweep_one, tasks))
        else:
            results = [_sweep_one(t) for t in tasks]
    rows = []
    for lam, rep, err in sorted(results, key=lambda r: r[0]):
        row = [lam]
        for q in ("v_Linf", "u_Linf"):
            e = (rep or {}).get("quantities", {}).get(q, {})
            row += [e.get("fitted"), e.get("predicted"), e.get("margin")]
        for q in ("v_Linf", "u_Linf"):
            row.append((rep or {}).get("quantities", {}).get(q, {}).get("r2"))
        row.append("ok" if not err else err.replace("\n", " "))
        rows.append(row)
    os.makedirs(out, exist_ok=True)
    text = _csv_text(SWEEP_COLUMNS, [["" if x is None else x for x in r] for r in rows])
    atomic_write_text(os.path.join(out, "sweep.csv"), text)
    atomic_write_text(os.path.join(out, "sweep.gp"), _sweep_script(cfg.regime))
    return rows


def _sweep_script(regime):
    if regime == "dirichlet":
        curve = ("vpred(l) = l < 0.6 ? 3*(l+1)/4 : (3-l)/2\n"
                 "upred(l) = l < 0.6 ? (l+5)/4 : 2-l\n")
    else:
        curve = "vpred(l) = NaN\nupred(l) = NaN\n"
    return ("# gnuplot script: fitted decay exponents against lambda\n"
            "set datafile separator ','\n"
            "set xlabel 'lambda'\nset ylabel 'exponent'\nset key left top\n"
            "set terminal pngcairo size 900,600\nset output 'sweep.png'\n"
            + curve +
            "set xrange [0:1]\n"
            "plot 'sweep.csv' using 1:2 every ::1 with points pt 7 title 'fitted v', \\\n"
            "     'sweep.csv' using 1:5 every ::1 with points pt 5 title 'fitted u', \\\n"
            "     vpred(x) with lines title 'predicted v', \\\n"
            "     upred(x) with lines dashtype 2 title 'predicted u'\n")


# ---------------------------------------------------------------- entry point

def _parse_lambdas(text):
    if text is None or not text.strip():
        return []
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"--lambdas: cannot parse {text!r}") from None


def main(argv=None):
    parser = argparse.ArgumentParser(prog="diffwave", description="Damped p-system diffusion-wave laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("config")
    p_sw = sub.add_parser("sweep", help="run one experiment per lambda")
    p_sw.add_argument("config")
    p_sw.add_argument("--lambdas", default="")
    p_sw.add_argument("--jobs", type=int, default=1)
    p_wave = sub.add_parser("wave", help="build and export the diffusion wave only")
    p_wave.add_argument("config")
    sub.add_parser("check", help="run the analytic-identity self-test")
    args = parser.parse_args(argv)

    try:
        if args.command == "check":
            from .selfcheck import selfcheck
            ok = selfcheck(verbose=True)
            return EXIT_OK if ok else EXIT_NUMERICAL
        cfg = parse_config(args.config)
        if args.command == "run":
            report = run_experiment(cfg)
            for name, q in report.quantities.items():
                if "fitted" in q:
                    pred = q.get("predicted")
                    print(f"{name:14s} fitted {q['fitted']:.4f}  predicted "
                          f"{'-' if pred is None else format(pred, '.4f')}  R2 {q['r2']:.4f}")
            print(f"artifacts in {output_dir(cfg)}")
        elif args.command == "sweep":
            if args.jobs < 1:
                raise ConfigError("--jobs must be at least 1")
            rows = sweep(cfg, _parse_lambdas(args.lambdas), args.jobs)
            for r in rows:
                print(",".join("" if x is None else str(x) for x in r))
        elif args.command == "wave":
            wave, _ = build_wave(cfg)
            path = os.path.join(output_dir(cfg), "wave_profile.txt")
            save_profile(wave, path)
            print(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, WaveError, DomainError, FloatingPointError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
