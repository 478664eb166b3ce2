import warnings

import numpy as np
import pytest

from wavesph.correction import CorrectionConfig
from wavesph.diagnostics import kinetic_energy
from wavesph.domain import Kind, PairList
from wavesph.physics import eos_density
from wavesph.scenarios import (ConfigurationError, ResolutionWarning, StandingWaveConfig, WaveTankConfig,
                               fluid_columns_over_x, init_standing_wave, init_wave_tank)
from wavesph.wave_theory import theoretical_kinetic_energy


@pytest.fixture(scope="module")
def standing():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        return init_standing_wave(StandingWaveConfig())


@pytest.fixture(scope="module")
def tank():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        return init_wave_tank(WaveTankConfig(flat_length=3.0, dp=1 / 16, t_end=1.0))


def min_spacing(sc):
    pl = PairList.build(sc.ps, sc.box, sc.h, 0.0)
    i, j = pl.pairs()
    d = sc.ps.position[i] - sc.ps.position[j] + pl.shifts[pl.image]
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", d, d))))


def test_standing_wave_layout(standing):
    sc = standing
    fluid = sc.ps.kind == Kind.FLUID
    # 32 x 32 columns, thickness ceil(6 * 1.3) = 8 particles
    assert np.count_nonzero(fluid) == 32 * 32 * 8
    assert np.count_nonzero(sc.ps.kind == Kind.DYNAMIC_BOUNDARY) == 3 * 32 * 8
    assert sc.box.lengths[1] == pytest.approx(8 / 32)
    assert sc.box.periodic == (True, True, False)
    assert sc.gauges == (0.5,)
    assert np.all(sc.ps.mass == pytest.approx(1000.0 / 32**3))


def test_standing_wave_initial_state(standing):
    sc = standing
    fluid = sc.ps.kind == Kind.FLUID
    pos, vel = sc.ps.position, sc.ps.velocity
    assert pos[fluid, 2].max() < 0.0
    node = fluid & np.isclose(np.sin(sc.wave.wavenumber * pos[:, 0]), 0.0, atol=1e-12)
    assert np.all(np.abs(vel[node, 0]) < 1e-12)
    # velocity constant along y
    first = fluid & np.isclose(pos[:, 1], pos[fluid, 1].min())
    assert np.count_nonzero(first) * 8 == np.count_nonzero(fluid)
    assert np.all(vel[:, 1] == 0.0)
    np.testing.assert_allclose(sc.ps.pressure, -1000.0 * 9.81 * pos[:, 2])
    np.testing.assert_allclose(sc.ps.density, eos_density(sc.ps.pressure, sc.fluid), rtol=1e-14)


def test_standing_wave_energy_matches_theory(standing):
    sc = standing
    theory = theoretical_kinetic_energy(0.0, sc.wave, 1000.0, 1e-6) * sc.box.lengths[1]
    assert kinetic_energy(sc.ps) == pytest.approx(theory, rel=0.05)


def test_standing_wave_spacing(standing):
    assert min_spacing(standing) >= 0.99 / 32


def test_at_rest_variant():
    sc = init_standing_wave(StandingWaveConfig(at_rest=True, dp=1 / 16))
    assert sc.name == "hydrostatic"
    assert np.all(sc.ps.velocity == 0.0)


def test_standing_wave_geometry_errors():
    with pytest.raises(ConfigurationError):
        init_standing_wave(StandingWaveConfig(dp=0.3))
    with pytest.raises(ConfigurationError):
        StandingWaveConfig(dp=-1.0)
    with pytest.raises(ConfigurationError):
        StandingWaveConfig(t_end=-1.0)


def test_resolution_warnings():
    # four particles per amplitude H_s / 2 = 1/64 needs dp = 1/256; desk spacings warn
    with pytest.warns(ResolutionWarning):
        StandingWaveConfig()
    with warnings.catch_warnings():
        warnings.simplefilter("error", ResolutionWarning)
        StandingWaveConfig(dp=1 / 256)
        StandingWaveConfig(dp=1 / 16, at_rest=True)
        WaveTankConfig()  # H / dp = 6.4
    with pytest.warns(ResolutionWarning):
        WaveTankConfig(dp=1 / 32)


def test_sound_speed_guard():
    with pytest.warns(UserWarning, match="c0"):
        StandingWaveConfig(c0=60.0)


def test_thickness_rules():
    assert StandingWaveConfig().thickness == pytest.approx(8 / 32)
    assert WaveTankConfig().thickness == pytest.approx(11 / 64)  # ceil(8 * 1.3) = 11


def test_correction_bound_to_wave():
    cfg = StandingWaveConfig(correction=CorrectionConfig("localized", 0.5))
    assert cfg.correction.pressure_threshold == 4905.0


def test_tank_defaults():
    cfg = WaveTankConfig()
    assert cfg.t_end == pytest.approx(68.11)
    assert cfg.t_end >= cfg.front_travel_time
    assert cfg.gauges == (25.0,)
    assert cfg.wave.is_deep_water
    assert cfg.depth / cfg.wave.wavelength == pytest.approx(2 / 3, rel=2e-3)
    short = WaveTankConfig(flat_length=15.0, dp=1 / 32)
    assert short.t_end >= short.front_travel_time


def test_tank_initial_state(tank):
    sc = tank
    fluid = sc.ps.kind == Kind.FLUID
    assert np.all(sc.ps.velocity[fluid] == 0.0)
    assert sc.ps.position[fluid, 2].max() < 0.0
    deepest = np.argmin(np.where(fluid, sc.ps.position[:, 2], np.inf))
    assert sc.ps.pressure[deepest] == pytest.approx(9810.0, rel=0.1)
    assert sc.box.periodic == (False, True, False)
    assert len(sc.planes) == 2 and sc.lj is not None
    assert np.count_nonzero(sc.ps.kind == Kind.WAVEMAKER) == len(sc.wavemaker.template)
    assert np.all(sc.ps.position[sc.wavemaker.indices, 0] == 0.0)
    assert min_spacing(sc) >= 0.99 / 16


def test_tank_beach_taper(tank):
    # over the slope from x = 3 to x = 13 the water column thins linearly
    edges = np.arange(4.0, 12.01, 1.0)
    counts = fluid_columns_over_x(tank.ps, tank.dp, edges)
    assert np.all(np.diff(counts) < 0)
    x = 0.5 * (edges[1:] + edges[:-1])
    line = np.polyval(np.polyfit(x, counts, 1), x)
    assert np.max(np.abs(counts - line)) <= 0.02 * counts[0]


def test_tank_fluid_clear_of_bottom(tank):
    fluid = tank.ps.kind == Kind.FLUID
    for plane in tank.planes:
        d = (tank.ps.position[fluid] - np.asarray(plane.point)) @ np.asarray(plane.normal)
        assert d.min() >= tank.lj.r0 - 1e-12


def test_tank_rejects_bad_geometry():
    with pytest.raises(ConfigurationError):
        WaveTankConfig(slope=0.0)
    with pytest.raises(ConfigurationError):
        WaveTankConfig(t_end=-2.0)
