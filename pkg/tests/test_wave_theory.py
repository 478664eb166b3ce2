import math

import pytest
from hypothesis import given, strategies as st

from wavesph import wave_theory as wt
from wavesph.wave_theory import WaveParameters

G = 9.81

# independent reference values (30-digit mpmath evaluation of the closed forms)
OMEGA_UNIT = 7.85096286827168932
K_TANK = 4.19215165486051133
R_TANK = 1.53055961112673450
R_DEEP20 = 1.90000000041223006
P_MID = 4909.24718719295391  # -rho g z + rho g eta cosh(k(d+z))/cosh(kd) at z=-0.5, eta=0.01


def test_omega_unit_basin():
    assert wt.omega_from_wavelength(1.0, 1.0) == pytest.approx(OMEGA_UNIT, rel=1e-12)


def test_omega_limits():
    k = 2.0 * math.pi / 0.5
    assert wt.omega_from_wavelength(0.5, 100.0) == pytest.approx(math.sqrt(G * k), rel=1e-12)
    k = 2.0 * math.pi / 1000.0
    assert wt.omega_from_wavelength(1000.0, 0.1) == pytest.approx(k * math.sqrt(G * 0.1), rel=1e-4)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_omega_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        wt.omega_from_wavelength(bad, 1.0)
    with pytest.raises(ValueError):
        wt.omega_from_wavelength(1.0, bad)


def test_wavenumber_tank_period():
    k = wt.wavenumber_from_period(0.98, 1.0)
    assert k == pytest.approx(K_TANK, rel=1e-10)
    assert 2.0 * math.pi / k == pytest.approx(1.5, rel=2e-3)


def test_wavenumber_standing_period():
    assert wt.wavenumber_from_period(0.8, 1.0) == pytest.approx(2.0 * math.pi, rel=1e-3)


def test_wavenumber_iteration_cap():
    with pytest.raises(ArithmeticError):
        wt.wavenumber_from_period(0.8, 1.0, max_iter=0)


@given(st.floats(0.05, 50.0), st.floats(0.01, 100.0))
def test_round_trip(wavelength, depth):
    omega = wt.omega_from_wavelength(wavelength, depth)
    k = wt.wavenumber_from_period(2.0 * math.pi / omega, depth)
    assert k == pytest.approx(2.0 * math.pi / wavelength, rel=1e-9)


@given(st.floats(0.05, 50.0), st.floats(0.01, 100.0), st.booleans())
def test_parameters_invariants(length, depth, by_period):
    w = (WaveParameters.from_period(length, 0.1, depth) if by_period
         else WaveParameters.from_wavelength(length, 0.1, depth))
    assert w.wavenumber * w.wavelength == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert w.angular_frequency * w.period == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert w.dispersion_residual() < 1e-10
    assert w.phase_velocity == pytest.approx(w.wavelength / w.period, rel=1e-12)


def test_orbital_velocity_surface_and_bottom():
    w = WaveParameters.from_wavelength(1.0, 0.1, 1.0)
    ux, uz = wt.orbital_velocity(0.0, 0.0, 0.0, w)
    expected = w.height * G * w.wavenumber / (2.0 * w.angular_frequency)
    assert ux == pytest.approx(expected, rel=1e-12)
    assert uz == 0.0
    for x in (0.1, 0.37, 0.8):
        assert wt.orbital_velocity(x, -1.0, 0.3, w)[1] == pytest.approx(0.0, abs=1e-15)


def test_deep_water_decay_ratio():
    # deep enough that the bottom correction is far below 1e-6
    w = WaveParameters.from_wavelength(1.0, 0.1, 20.0)
    phase_x = 0.1
    top = math.hypot(*wt.orbital_velocity(phase_x, 0.0, 0.0, w))
    mid = math.hypot(*wt.orbital_velocity(phase_x, -0.5, 0.0, w))
    assert mid / top == pytest.approx(math.exp(-math.pi), abs=1e-6)


@given(st.floats(0.0, 2.0 * math.pi), st.floats(0.3, 3.0))
def test_orbital_speed_decays_with_depth(phase, depth):
    w = WaveParameters.from_wavelength(1.0, 0.05, depth)
    x = phase / w.wavenumber
    zs = [-depth * f for f in (0.0, 0.1, 0.25, 0.5, 0.75, 1.0)]
    speeds = [math.hypot(*wt.orbital_velocity(x, z, 0.0, w)) for z in zs]
    assert all(a >= b * (1.0 - 1e-12) for a, b in zip(speeds, speeds[1:]))


def test_linear_pressure():
    w = WaveParameters.from_wavelength(1.0, 0.1, 1.0)
    assert wt.linear_pressure(0.0, -0.3, 0.0, 0.0, w, 1000.0) == pytest.approx(1000 * G * 0.3)
    assert wt.linear_pressure(0.0, 0.0, 0.0, 0.02, w, 1000.0) == pytest.approx(1000 * G * 0.02)
    assert wt.linear_pressure(0.0, -0.5, 0.0, 0.01, w, 1000.0) == pytest.approx(P_MID, rel=1e-12)


def test_theoretical_kinetic_energy():
    w = WaveParameters.from_wavelength(1.0, 1.0 / 32.0, 1.0)
    assert wt.theoretical_kinetic_energy(0.0, w, 1000.0, 1e-6) == pytest.approx(0.5987548828125, rel=1e-12)
    # no viscosity: the envelope repeats every half period
    e0 = wt.theoretical_kinetic_energy(0.0, w, 1000.0, 0.0)
    assert wt.theoretical_kinetic_energy(10 * w.period, w, 1000.0, 0.0) == pytest.approx(e0, rel=1e-9)


@given(st.floats(0.0, 100.0))
def test_kinetic_energy_non_negative(t):
    w = WaveParameters.from_wavelength(1.0, 1.0 / 32.0, 1.0)
    assert wt.theoretical_kinetic_energy(t, w, 1000.0, 1e-6) >= 0.0


def test_theoretical_damping():
    assert wt.theoretical_damping(1e-6, 2.0 * math.pi) == pytest.approx(-1.579e-4, abs=1e-7)
    assert wt.theoretical_damping(0.0, 3.0) == 0.0
    assert wt.theoretical_damping(1e-6, 4.0) == pytest.approx(4.0 * wt.theoretical_damping(1e-6, 2.0))


def test_reynolds_estimate():
    assert wt.reynolds_number(1.0, 1e-6) == pytest.approx(4.4e6, rel=0.02)


def test_flap_transfer_and_stroke():
    assert wt.flap_transfer(K_TANK) == pytest.approx(R_TANK, rel=1e-12)
    assert wt.flap_stroke(0.1, K_TANK, 1.0) == pytest.approx(0.1 / R_TANK, rel=1e-12)
    assert wt.flap_stroke(0.2, K_TANK, 1.0) == pytest.approx(2 * wt.flap_stroke(0.1, K_TANK, 1.0))


def test_flap_transfer_limits():
    # the closed form at kd = 20 is 1.9, i.e. 2 (kd - 1)/kd; the limit 2 needs kd >> 1
    assert wt.flap_transfer(20.0) == pytest.approx(R_DEEP20, rel=1e-12)
    assert wt.flap_transfer(2e6) == pytest.approx(2.0, abs=1e-6)
    assert wt.flap_transfer(1e-3) == pytest.approx(0.5e-3, rel=1e-3)  # shallow: kd/2


@given(st.floats(1e-3, 1e3))
def test_flap_transfer_bounded(kd):
    assert 0.0 < wt.flap_transfer(kd) < 2.0
