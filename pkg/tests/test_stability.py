import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mandeldde.cycles import cardioid_point
from mandeldde.errors import DivisionByZeroRay
from mandeldde.stability import (hopf_boundary_curve, hopf_boundary_point, hopf_c,
                                 is_stable, nyquist_oracle, predicted_period, ray_slope,
                                 solve_omega, stationary_points)


def lag(w, tau0):
    return w * tau0 + math.atan(w)


@settings(max_examples=200)
@given(phi=st.floats(0.0, math.pi), tau0=st.floats(0.1, 1e4))
def test_omega_residual(phi, tau0):
    w = solve_omega(phi, tau0)
    assert w >= 0
    assert abs(lag(w, tau0) - phi) < 1e-12


def test_omega_frozen_values():
    assert solve_omega(2.517, 10) == pytest.approx(0.22917183137829697, abs=1e-15)
    assert solve_omega(math.pi, 10) == pytest.approx(0.2862772587515207, abs=1e-15)
    assert solve_omega(0.0, 10) == 0.0


def test_omega_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_omega(-0.1, 10)
    with pytest.raises(ValueError):
        solve_omega(1.0, 0.0)


@pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 37)[:-1])
@pytest.mark.parametrize("tau0", [0.5, 10.0, 200.0])
def test_hopf_sample_invariants(phi, tau0):
    s = hopf_boundary_point(phi, tau0)
    phi_eff = min(s.phi, 2 * math.pi - s.phi)
    assert abs(lag(s.omega, tau0) - phi_eff) < 1e-12
    z_s = s.marginal_modulus * cmath.exp(1j * s.phi)
    assert abs(z_s - z_s * z_s - s.c_H) < 1e-12
    lam = 1j * s.omega
    # the conjugate branch crosses at -i*omega
    if s.phi > math.pi:
        lam = -lam
    assert abs(lam + 1 - 2 * z_s * cmath.exp(-lam * tau0)) < 1e-10


def test_hopf_reduces_to_cardioid():
    for phi in np.linspace(0, 2 * math.pi, 101):
        assert hopf_c(phi, 0.0) == cardioid_point(phi)


def test_hopf_converges_to_cardioid_for_long_delay():
    for s in hopf_boundary_curve(1e4, 64):
        assert abs(s.c_H - cardioid_point(s.phi)) < 1e-4


def test_hopf_onset_on_real_axis():
    s = hopf_boundary_point(math.pi, 10)
    assert s.c_H.imag == 0
    assert s.c_H.real == pytest.approx(-0.7905739171734335, abs=1e-14)


def test_hopf_frozen_c():
    c = hopf_boundary_point(2.517, 10).c_H
    assert abs(c - complex(-0.4992895809536728, 0.549601722577746)) < 1e-14
    assert abs(hopf_c(2.517, 0.2292) - complex(-0.499293153609825, 0.5496066248807764)) < 1e-14


def test_curve_conjugate_symmetric():
    curve = hopf_boundary_curve(10, 64)
    assert len(curve) == 64
    for k in range(1, 32):
        # 2*pi - phi_k is only the mirror angle up to rounding
        assert abs(curve[64 - k].c_H - curve[k].c_H.conjugate()) < 1e-14
        assert curve[64 - k].omega == pytest.approx(curve[k].omega, abs=1e-15)


def test_predicted_period():
    assert predicted_period(0.2292) == pytest.approx(27.41354846064392, rel=1e-14)
    assert predicted_period(solve_omega(2.517, 10)) == pytest.approx(27.417, abs=2e-3)
    with pytest.raises(ValueError):
        predicted_period(0.0)


def test_predicted_period_independent_of_radius():
    # the marginal pair depends on (phi, tau0) only
    base = hopf_boundary_point(2.517, 10)
    for k in (0.5, 1.0, 1.02, 3.0):
        z_s = k * base.marginal_modulus * cmath.exp(1j * 2.517)
        v = is_stable(z_s, 10)
        assert v.omega_used == base.omega
        assert v.binding_threshold == base.marginal_modulus


def test_ray_slope():
    assert ray_slope(2.517, 10) == pytest.approx(-1.1007674574902484, rel=1e-12)
    # bisect for the angle where the boundary crosses the imaginary axis
    lo, hi = 0.5, 2.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hopf_boundary_point(mid, 10).c_H.real > 0:
            lo = mid
        else:
            hi = mid
    assert hopf_boundary_point(lo, 10).c_H.real < 1e-14
    with pytest.raises(DivisionByZeroRay):
        ray_slope(lo, 10)


def test_stationary_points():
    a, b = stationary_points(0.1)
    assert a == pytest.approx((1 - math.sqrt(0.6)) / 2)
    assert b == pytest.approx((1 + math.sqrt(0.6)) / 2)
    for z in stationary_points(0.3 - 0.7j):
        assert abs(z * z - z + (0.3 - 0.7j)) < 1e-14


def test_is_stable_examples():
    assert is_stable(-0.5, 10).stable
    assert not is_stable(-0.55, 10).stable
    assert is_stable(0, 10).stable
    v = is_stable(1.5, 10)
    assert not v.stable and v.binding_threshold == 0.5 and v.omega_used == 0
    up, down = is_stable(0.3 + 0.4j, 10), is_stable(0.3 - 0.4j, 10)
    assert up.stable == down.stable
    assert up.binding_threshold == down.binding_threshold
    assert down.phi_used == pytest.approx(2 * math.pi - up.phi_used)


def test_nyquist_rejects_coarse_grid():
    with pytest.raises(ValueError):
        nyquist_oracle(0.3, 10, n_points=100)


def test_nyquist_matches_is_stable_on_random_probes():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 16:
        tau0 = float(rng.uniform(0.5, 20))
        z_s = complex(*rng.uniform(-1.2, 1.2, 2))
        v = is_stable(z_s, tau0)
        if abs(abs(z_s) - v.binding_threshold) <= 1e-3:
            continue
        assert nyquist_oracle(z_s, tau0) == v.stable
        checked += 1
