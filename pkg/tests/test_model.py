import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffwave.model import (
    DampingSchedule, DomainError, FarFieldState, GammaLaw, B_tail, B_tail_closed_form,
    beta_kernel, beta_kernel_deriv, damping_coefficient, pressure, pressure_deriv,
    sandwich_threshold, sound_speed,
)

# frozen oracles (mpmath quadrature, cross-checked by step-halving Simpson)
B_ALPHA1_LAM05_T0 = -1.5
SOUND_SPEED_G14_V2 = 0.51502465876821826


@pytest.mark.parametrize("gamma, v, expected", [(1.4, 1.0, 1.0), (1.0, 2.0, 0.5), (1.5, 2.0, 2 ** -1.5)])
def test_pressure_examples(gamma, v, expected):
    assert pressure(GammaLaw(gamma), v) == pytest.approx(expected, rel=1e-15)


def test_pressure_rejects_vacuum():
    with pytest.raises(DomainError):
        pressure(GammaLaw(), 0.0)
    with pytest.raises(DomainError):
        sound_speed(GammaLaw(), -1.0)


def test_pressure_deriv_examples():
    assert pressure_deriv(GammaLaw(1.4), 1.0, 1) == pytest.approx(-1.4)
    assert pressure_deriv(GammaLaw(2.0), 1.0, 2) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        pressure_deriv(GammaLaw(), 1.0, 4)


def test_pressure_deriv_against_finite_difference():
    law, v, h = GammaLaw(1.4), 1.3, 1e-5
    fd = (pressure(law, v + h) - pressure(law, v - h)) / (2 * h)
    assert abs(pressure_deriv(law, v, 1) - fd) <= 1e-7 * abs(fd)


@settings(max_examples=60, deadline=None)
@given(v=st.floats(0.5, 2.0), gamma=st.floats(1.0, 3.0))
def test_gamma_law_derivative_chain(v, gamma):
    law, h = GammaLaw(gamma), 1e-5
    for order in (1, 2, 3):
        lo = pressure(law, v - h) if order == 1 else pressure_deriv(law, v - h, order - 1)
        hi = pressure(law, v + h) if order == 1 else pressure_deriv(law, v + h, order - 1)
        fd = (hi - lo) / (2 * h)
        assert abs(pressure_deriv(law, v, order) - fd) <= 1e-6 * abs(fd)
    assert pressure(law, v) > 0 and pressure_deriv(law, v, 1) < 0


@pytest.mark.parametrize("alpha, lam, t, expected", [(1, 0.5, 0, 1.0), (2, 0.5, 3, 1.0), (3, 0, 100, 3.0)])
def test_damping_coefficient_examples(alpha, lam, t, expected):
    assert damping_coefficient(DampingSchedule(alpha, lam), t) == pytest.approx(expected)


def test_damping_coefficient_rejects_negative_time():
    with pytest.raises(DomainError):
        damping_coefficient(DampingSchedule(1, 0), -1.0)


@pytest.mark.parametrize("alpha, lam, t, expected", [
    (1, 0, 1, math.exp(-1)), (2, 1, 3, 1 / 16), (1, 0.5, 3, math.exp(-2))])
def test_beta_examples(alpha, lam, t, expected):
    assert beta_kernel(DampingSchedule(alpha, lam), t) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(0.2, 3.0), lam=st.sampled_from([0.0, 0.3, 0.6, 0.9, 1.0]), t=st.floats(0.0, 50.0))
def test_beta_ode_identity_and_monotonicity(alpha, lam, t):
    s = DampingSchedule(alpha, lam)
    a = damping_coefficient(s, t)
    b = beta_kernel(s, t)
    assert abs(beta_kernel_deriv(s, t) + a * b) <= 1e-15 * max(a * b, 1e-300)
    assert 0 < b <= 1
    assert beta_kernel(s, t + 1.0) < b or b == 0.0
    # central difference is O(h^2)
    if t > 1e-3:
        h = 1e-4
        fd = (beta_kernel(s, t + h) - beta_kernel(s, t - h)) / (2 * h)
        assert abs(fd + a * b) <= 1e-6 * max(a * b, 1e-200) + 1e-14


def test_B_examples():
    assert B_tail(DampingSchedule(1, 0), 0.0) == pytest.approx(-1.0, rel=1e-12)
    assert B_tail(DampingSchedule(2, 0), 1.0) == pytest.approx(-math.exp(-2) / 2, rel=1e-12)
    assert abs(B_tail(DampingSchedule(1, 0.5), 0.0) - B_ALPHA1_LAM05_T0) <= 1e-10


def test_B_rejects_divergent_lambda_one():
    with pytest.raises(DomainError):
        B_tail(DampingSchedule(1.0, 1.0), 0.0)
    assert B_tail(DampingSchedule(2.0, 1.0), 1.0) == pytest.approx(-0.5)


@pytest.mark.parametrize("alpha", [1.0, 2.0])
@pytest.mark.parametrize("lam", [0.0, 0.3, 0.6, 0.9])
def test_B_matches_incomplete_gamma(alpha, lam):
    s = DampingSchedule(alpha, lam)
    ts = np.geomspace(1e-2, 200, 25)
    a = B_tail(s, ts)
    b = B_tail_closed_form(s, ts)
    assert np.all(np.abs(a - b) <= 1e-10 + 1e-10 * np.abs(b))


@pytest.mark.parametrize("lam", [0.0, 0.3, 0.6, 0.9])
def test_B_negative_increasing_and_sandwich(lam):
    s = DampingSchedule(1.0, lam)
    ts = np.linspace(0, 40, 60)
    B = B_tail(s, ts)
    assert np.all(B < 0) and np.all(np.diff(B) > 0)
    lower = beta_kernel(s, ts) * (1 + ts) ** lam
    assert np.all(lower <= np.abs(B) * (1 + 1e-12))
    T = sandwich_threshold(s, t_max=1e3, n=400)
    late = ts[ts >= T]
    assert np.all(np.abs(B_tail(s, late)) <= 2 * beta_kernel(s, late) * (1 + late) ** lam)


def test_sound_speed_examples():
    assert sound_speed(GammaLaw(1.0), 1.0) == pytest.approx(1.0)
    assert sound_speed(GammaLaw(1.4), 1.0) == pytest.approx(math.sqrt(1.4))
    assert sound_speed(GammaLaw(1.4), 2.0) == pytest.approx(SOUND_SPEED_G14_V2, rel=1e-14)


def test_far_field_kappa():
    ff = FarFieldState.from_model(GammaLaw(1.4), DampingSchedule(2.0, 0.3), v_plus=1.0)
    assert ff.kappa == pytest.approx(0.7)
    with pytest.raises(ValueError):
        FarFieldState(1.0, 0.0, -1.0)


def test_schedule_validation_and_rescaled_time():
    with pytest.raises(ValueError):
        DampingSchedule(0.0, 0.5)
    with pytest.raises(ValueError):
        DampingSchedule(1.0, 1.5)
    s = DampingSchedule(1.0, 0.4)
    t = np.array([0.0, 1.0, 37.0])
    assert np.allclose(s.physical_time(s.rescaled_time(t)), t, rtol=1e-13, atol=1e-13)
    assert s.integral(0.0, 3.0) == pytest.approx(((4.0) ** 0.6 - 1) / 0.6)


def test_B_terminates_when_beta_is_subnormal():
    s = DampingSchedule(1.0, 0.0)
    for t in (700.0, 708.0, 1000.0):
        assert B_tail(s, t) == pytest.approx(B_tail_closed_form(s, t), rel=1e-10, abs=1e-320)
