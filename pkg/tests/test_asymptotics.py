import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffwave.asymptotics import (
    DecayReport, FitResult, PerturbationFields, RegimeError, UnpredictedQuantity, b_interval,
    boundedness_check, config_digest, fit_decay, norm, perturbation_fields, predicted_rate,
    reverse_cumulative, bound_weights, weighted_functionals,
)
from diffwave.correction import CorrectionPair, correction_cell_average
from diffwave.grid import Grid1D
from diffwave.model import DampingSchedule, FarFieldState, GammaLaw, B_tail
from diffwave.solver import State
from diffwave.waves import constant_wave, gaussian_linear_wave, neumann_selfsimilar_profile

# half-line L2 norm of exp(-x^2): sqrt(int_0^inf exp(-2x^2) dx), mpmath quadrature
HALF_LINE_GAUSS_L2 = 0.79161674354307977
LAW = GammaLaw(1.4)


# ---- norms ----

def test_norm_examples():
    g = Grid1D(10.0, 100)
    assert norm(np.zeros(100), g, "L2") == norm(np.zeros(100), g, "L1") == norm(np.zeros(100), g, "Linf") == 0
    e = np.zeros(100)
    e[7] = 1.0
    assert norm(e, g, "Linf") == 1.0
    assert norm(e, g, "L1") == pytest.approx(g.dx)
    assert norm(e, g, "L2") == pytest.approx(math.sqrt(g.dx))
    with pytest.raises(ValueError):
        norm(e, g, "H1")


def test_norm_gaussian_half_line():
    g = Grid1D(12.0, 24000)
    assert norm(np.exp(-g.x ** 2), g, "L2") == pytest.approx(HALF_LINE_GAUSS_L2, abs=1e-8)


# ---- rate tables ----

def test_predicted_rate_examples():
    assert predicted_rate("dirichlet", "v_Linf", 0.0).exponent == pytest.approx(0.75)
    assert predicted_rate("dirichlet", "u_Linf", 0.8).exponent == pytest.approx(1.2)
    crit = predicted_rate("dirichlet", "v_Linf", 0.6)
    assert crit.exponent == pytest.approx(1.2) and crit.epsilon_slack == pytest.approx(0.05)
    assert predicted_rate("dirichlet", "u_Linf", 0.6).exponent == pytest.approx(1.4)


def test_sweep_predictions():
    got = [predicted_rate("dirichlet", "v_Linf", lam).exponent for lam in (0.0, 0.3, 0.6, 0.8)]
    assert np.allclose(got, [0.75, 0.975, 1.2, 1.1])


@pytest.mark.parametrize("regime, cut", [("dirichlet", 0.6), ("neumann", 1 / 7)])
def test_rates_continuous_at_cutoff(regime, cut):
    h = 1e-9
    quantities = [("omega_k_L2", k) for k in range(4)] + [("omegat_k_L2", k) for k in range(3)]
    if regime == "dirichlet":
        quantities += [("v_Linf", None), ("u_Linf", None)]
    for q, k in quantities:
        lo = predicted_rate(regime, q, cut - h, k).exponent
        hi = predicted_rate(regime, q, cut + h, k).exponent
        at = predicted_rate(regime, q, cut, k).exponent
        assert abs(lo - hi) <= 1e-7 and abs(at - lo) <= 1e-7


def test_rates_reject_and_unpredicted():
    with pytest.raises(ValueError, match=r"\[0, 1\)"):
        predicted_rate("dirichlet", "v_Linf", 1.0)
    with pytest.raises(UnpredictedQuantity):
        predicted_rate("neumann", "v_Linf", 0.3)
    with pytest.raises(ValueError):
        predicted_rate("dirichlet", "omega_k_L2", 0.3, k=4)


def test_weight_tables():
    branch, terms = bound_weights("dirichlet", 0.2)
    w = {t.name: t for t in terms}
    assert branch == "sub"
    assert w["omega_2"].weight == pytest.approx(2.4)
    assert w["omegat_1"].weight == pytest.approx(3.2)
    assert w["int_omega_1"].weight == pytest.approx(0.2) and w["int_omega_1"].integrated
    branch, terms = bound_weights("dirichlet", 0.6)
    assert branch == "crit" and all(t.growth == 0.05 for t in terms)
    assert {t.name: t for t in terms}["omega_1"].weight == pytest.approx(1.6)
    branch, terms = bound_weights("dirichlet", 0.8)
    w = {t.name: t for t in terms}
    assert branch == "super"
    assert w["omega_1"].weight == pytest.approx(1.8 - 0.5)
    lo, hi = b_interval("dirichlet", 0.8)
    assert w["int_omega_0"].weight == pytest.approx(-1.8 + 0.5 * (lo + hi))
    with pytest.raises(ValueError):
        bound_weights("dirichlet", 0.8, b=hi)
    # constant-wave Neumann has no cut-off
    for lam in (0.1, 0.5, 0.9):
        branch, terms = bound_weights("neumann_constant", lam)
        assert branch == "sub"
        assert {t.name: t for t in terms}["omega_3"].weight == pytest.approx(3 * (lam + 1))
    assert bound_weights("neumann", 0.5)[0] == "super"


@pytest.mark.parametrize("regime, lam", [("dirichlet", 0.0), ("dirichlet", 0.4), ("neumann", 0.1),
                                         ("neumann_constant", 0.7)])
def test_synthetic_functionals_are_one(regime, lam):
    t = np.geomspace(1, 1e3, 50)
    q = lam + 1
    sq = {("omega", k): (1 + t) ** (-q * k) for k in range(4)}
    sq.update({("omegat", k): (1 + t) ** (-(q * k + 2)) for k in range(3)})
    out = weighted_functionals(t, sq, regime, lam)
    for name, (term, series) in out.items():
        if not term.integrated:
            assert np.allclose(series, 1.0, rtol=1e-12)


def test_zero_trajectory_functionals_vanish():
    t = np.linspace(0, 10, 11)
    sq = {(f, k): np.zeros_like(t) for f, n in (("omega", 4), ("omegat", 3)) for k in range(n)}
    for _, series in weighted_functionals(t, sq, "dirichlet", 0.0).values():
        assert np.all(series == 0)
    sq[("omega", 0)] = np.full_like(t, 3.0)
    assert np.all(weighted_functionals(t, sq, "dirichlet", 0.0)["omega_0"][1] == 3.0)


# ---- fitting ----

def test_fit_exact_power_law():
    t = np.geomspace(1, 1e3, 20)
    res = fit_decay(t, 7 * (1 + t) ** -1.25)
    assert abs(res.exponent - 1.25) <= 1e-12 and res.r2 == pytest.approx(1.0) and res.count == 20
    assert abs(fit_decay(t, np.full_like(t, 3.0)).exponent) <= 1e-12


def test_fit_corrupted_series():
    t = np.geomspace(100, 2000, 40)
    res = fit_decay(t, (1 + t) ** -0.75 * (1 + 5 / (1 + t)))
    assert abs(res.exponent - 0.75) <= 0.02


def test_fit_errors():
    t = np.geomspace(1, 10, 5)
    with pytest.raises(ValueError):
        fit_decay(t, np.ones_like(t))
    t = np.geomspace(1, 10, 10)
    y = np.ones_like(t)
    y[3] = 0
    with pytest.raises(ValueError):
        fit_decay(t, y)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(-3, 3), c=st.floats(1e-6, 1e6))
def test_fit_scale_invariance(p, c):
    t = np.geomspace(1, 1e3, 30)
    a = fit_decay(t, (1 + t) ** -p)
    b = fit_decay(t, c * (1 + t) ** -p)
    assert abs(a.exponent - p) <= 1e-10 and abs(b.exponent - p) <= 1e-10


def test_boundedness_examples():
    t = np.geomspace(1, 1e3, 40)
    ok = boundedness_check(t, (1 + t) ** -1.5, 1.5)
    assert ok.passed and abs(ok.slope) <= 1e-12 and ok.verdict == "PASS"
    bad = boundedness_check(t, (1 + t) ** -1.0, 1.5)
    assert not bad.passed and bad.slope == pytest.approx(0.5) and bad.verdict == "FAIL"
    assert boundedness_check(t, np.zeros_like(t), 2.0).passed


# ---- perturbation fields ----

def dirichlet_setup(lam=0.3, u_plus=0.01):
    sched = DampingSchedule(1.0, lam)
    ff = FarFieldState.from_model(LAW, sched, 1.0, u_plus)
    return sched, ff, gaussian_linear_wave(ff, 0.02, sched), CorrectionPair("dirichlet", u_plus, sched)


def synthesized_state(grid, wave, corr, t, omega_fn, z_fn):
    faces = grid.faces
    d = np.diff(omega_fn(faces)) / grid.dx
    v = wave.cell_average(faces, t, "v") + correction_cell_average(corr, faces, t, "v") + d
    u = wave.cell_average(faces, t, "u") + correction_cell_average(corr, faces, t, "u")
    return State(v, u + grid.cell_averages(z_fn, order=8), t)


def test_exact_cancellation():
    sched, ff, wave, corr = dirichlet_setup()
    g = Grid1D(60.0, 600)
    st_ = synthesized_state(g, wave, corr, 2.0, lambda y: 0 * y, lambda y: 0 * y)
    f = perturbation_fields(st_, g, wave, corr)
    assert np.max(np.abs(f.omega)) <= 1e-13 and np.max(np.abs(f.z)) <= 1e-13


def test_round_trip_second_order():
    sched, ff, wave, corr = dirichlet_setup()
    om = lambda y: 0.01 * np.exp(-(y - 12.0) ** 2 / 8.0)
    zz = lambda y: 0.01 * y * np.exp(-(y - 10.0) ** 2 / 8.0)
    errs = []
    for N in (300, 600, 1200):
        g = Grid1D(60.0, N)
        f = perturbation_fields(synthesized_state(g, wave, corr, 2.0, om, zz), g, wave, corr)
        errs.append((np.max(np.abs(f.omega - om(g.x))), np.max(np.abs(f.z - g.cell_averages(zz, order=8)))))
    errs = np.array(errs)
    order = np.log2(errs[:-1, 0] / errs[1:, 0])
    assert np.all(order > 1.8)
    assert np.all(errs[:, 1] <= 1e-14)


def test_omega_differentiates_back():
    g = Grid1D(30.0, 3000)
    d = np.exp(-(g.x - 10) ** 2)
    om = reverse_cumulative(d, g.dx)
    back = (om[2:] - om[:-2]) / (2 * g.dx)
    assert np.max(np.abs(back - d[1:-1])) <= 5 * g.dx ** 2
    assert om[-1] == pytest.approx(-0.5 * g.dx * d[-1])


def test_neumann_constant_wave_omega_at_origin():
    lam = 0.5
    sched = DampingSchedule(1.0, lam)
    ff = FarFieldState.from_model(LAW, sched, 1.0, 0.01)
    corr = CorrectionPair("neumann", 0.01, sched, u0_at_0=0.03)
    wave = constant_wave(ff, LAW, sched)
    g = Grid1D(20.0, 2000)
    t = 1.5
    f = perturbation_fields(State(np.ones(g.N), np.full(g.N, 0.01), t), g, wave, corr)
    # v == v_+ so omega(0) = int_0^inf v_hat = amplitude * B(t)
    assert abs(f.omega[0] - corr.amplitude * B_tail(sched, t)) <= 1e-8 * abs(corr.amplitude * B_tail(sched, t))


def test_regime_mismatch():
    sched, ff, _, corr = dirichlet_setup()
    wave = neumann_selfsimilar_profile(1.05, ff, LAW, sched)
    g = Grid1D(20.0, 100)
    with pytest.raises(RegimeError):
        perturbation_fields(State(np.ones(100), np.zeros(100), 1.0), g, wave, corr)


# ---- report ----

def test_report_round_trip():
    rep = DecayReport("dirichlet", 0.3, "abc", (200.0, 2000.0))
    rep.add_quantity("v_Linf", FitResult(1.0, 0.99, 12, (200.0, 2000.0)), 0.975, 0.2)
    rep.meta["x"] = float("nan")
    text = rep.to_json()
    d = json.loads(text)
    assert d["quantities"]["v_Linf"]["verdict"] == "PASS" and d["meta"]["x"] is None
    back = DecayReport.from_json(text)
    assert back.quantities == d["quantities"] and back.window == (200.0, 2000.0)


def test_config_digest_is_canonical():
    assert config_digest({"a": 1, "b": [1, 2]}) == config_digest({"b": [1, 2], "a": 1})
    assert len(config_digest({})) == 64
