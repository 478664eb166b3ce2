"""
Ready-made experiments: the periodic standing-wave basin (also used at rest as
a hydrostatic test) and the flap-driven wave tank with a sloping beach.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .boundaries import (FlapWavemaker, build_bottom_layers, flap_template, tank_planes,
                         wavemaker_particles)
from .correction import CorrectionConfig
from .domain import DomainBox, Kind, ParticleSystem
from .integrator import Solver
from .physics import FluidProperties, LennardJones, RateEvaluator, eos_density
from .wave_theory import G, WaveParameters


class ResolutionWarning(UserWarning):
    """The particle spacing is coarser than the wave-resolution guideline."""


class ConfigurationError(ValueError):
    pass


def _cells(length: float, dp: float, what: str) -> int:
    n = int(round(length / dp))
    if n < 1 or abs(n * dp - length) > 1e-6 * length:
        raise ConfigurationError(f"particle spacing {dp!r} does not divide the {what} {length!r}")
    return n


def _thickness(multiple_of_h: float, h: float, dp: float) -> int:
    return int(math.ceil(multiple_of_h * h / dp - 1e-9))


def _bind_correction(corr: CorrectionConfig, wavelength: float, rho0: float, g: float) -> CorrectionConfig:
    return dataclasses.replace(corr, wavelength=wavelength, rho0=rho0, g=g)


@dataclass(frozen=True)
class StandingWaveConfig:
    wavelength: float = 1.0
    depth: float = 1.0
    period: float = 0.8
    t_end: float = 20.0
    height: float = 1.0 / 32.0
    g: float = G
    rho0: float = 1000.0
    nu: float = 1e-6
    gamma: float = 7.0
    c0: float = 89.0
    xi: float = 0.1
    dp: float = 1.0 / 32.0
    h_factor: float = 1.3
    correction: CorrectionConfig = field(default_factory=CorrectionConfig)
    at_rest: bool = False
    gauge_x: float = 0.5

    def __post_init__(self):
        for name in ("wavelength", "depth", "height", "dp", "h_factor", "c0"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.t_end < 0.0:
            raise ConfigurationError("t_end must be non-negative")
        object.__setattr__(self, "correction",
                           _bind_correction(self.correction, self.wavelength, self.rho0, self.g))
        ref = 20.0 * math.sqrt(2.0 * self.g * self.depth)
        if abs(self.c0 / ref - 1.0) > 0.02:
            warnings.warn(f"c0 = {self.c0} departs from 20 sqrt(2 g d) = {ref:.4g} by more than 2%",
                          stacklevel=2)
        if not self.at_rest and 0.5 * self.height / self.dp < 4.0 - 1e-9:
            warnings.warn(
                f"spacing {self.dp:.6g} resolves the amplitude {0.5 * self.height:.6g} with fewer"
                " than four particles", ResolutionWarning, stacklevel=2)

    @property
    def h(self) -> float:
        return self.h_factor * self.dp

    @property
    def wave(self) -> WaveParameters:
        return WaveParameters.from_wavelength(self.wavelength, self.height, self.depth, self.g)

    @property
    def fluid(self) -> FluidProperties:
        return FluidProperties(self.rho0, self.c0, self.gamma, self.nu, self.xi, gravity=(0.0, 0.0, -self.g))

    @property
    def thickness(self) -> float:
        return _thickness(6.0, self.h, self.dp) * self.dp


@dataclass(frozen=True)
class WaveTankConfig:
    depth: float = 1.0
    period: float = 0.98
    t_end: float | None = None
    height: float = 0.1
    g: float = G
    rho0: float = 1000.0
    nu: float = 1e-6
    gamma: float = 7.0
    c0: float = 89.0
    xi: float = 0.1
    dp: float = 1.0 / 64.0
    h_factor: float = 1.3
    flat_length: float = 50.0
    slope: float = 0.1
    correction: CorrectionConfig = field(default_factory=CorrectionConfig)
    ramp_periods: float = 2.0
    gauges: tuple | None = None

    def __post_init__(self):
        for name in ("depth", "period", "height", "dp", "h_factor", "flat_length", "slope", "c0"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.t_end is None:
            # same margin over the front travel time 2 T l / lambda as the full-length tank
            object.__setattr__(self, "t_end", 68.11 * self.flat_length / 50.0)
        if self.t_end < 0.0:
            raise ConfigurationError("t_end must be non-negative")
        if self.gauges is None:
            object.__setattr__(self, "gauges", (0.5 * self.flat_length,))
        object.__setattr__(self, "correction",
                           _bind_correction(self.correction, self.wave.wavelength, self.rho0, self.g))
        if self.height / self.dp < 6.4 - 1e-9:
            warnings.warn(f"spacing {self.dp:.6g} gives H/dp = {self.height / self.dp:.3g} < 6.4",
                          ResolutionWarning, stacklevel=2)

    @property
    def h(self) -> float:
        return self.h_factor * self.dp

    @property
    def wave(self) -> WaveParameters:
        return WaveParameters.from_period(self.period, self.height, self.depth, self.g)

    @property
    def fluid(self) -> FluidProperties:
        return FluidProperties(self.rho0, self.c0, self.gamma, self.nu, self.xi, gravity=(0.0, 0.0, -self.g))

    @property
    def thickness(self) -> float:
        return _thickness(8.0, self.h, self.dp) * self.dp

    @property
    def front_travel_time(self) -> float:
        return 2.0 * self.period * self.flat_length / self.wave.wavelength

    @property
    def lennard_jones(self) -> LennardJones:
        return LennardJones(self.g * self.depth, self.dp)


@dataclass
class Scenario:
    """A built experiment: particles, box, physics and boundary objects."""

    name: str
    ps: ParticleSystem
    box: DomainBox
    fluid: FluidProperties
    h: float
    dp: float
    correction: CorrectionConfig
    wave: WaveParameters
    t_end: float
    gauges: tuple = ()
    planes: tuple = ()
    lj: LennardJones | None = None
    wavemaker: FlapWavemaker | None = None

    def evaluator(self) -> RateEvaluator:
        return RateEvaluator(self.fluid, self.h, self.correction, self.planes, self.lj)

    def solver(self, **kwargs) -> Solver:
        return Solver(self.ps, self.box, self.evaluator(), self.h, self.fluid.c0,
                      kinematics=self.wavemaker, **kwargs)


def _hydrostatic_density(z, fp: FluidProperties):
    return eos_density(-fp.rho0 * fp.g * np.asarray(z), fp)


def init_standing_wave(cfg: StandingWaveConfig) -> Scenario:
    dp, d, h = cfg.dp, cfg.depth, cfg.h
    nx = _cells(cfg.wavelength, dp, "wavelength")
    nz = _cells(d, dp, "depth")
    ny = _thickness(6.0, h, dp)
    x = (np.arange(nx) + 0.5) * dp
    y = (np.arange(ny) + 0.5) * dp
    z = -0.5 * dp - np.arange(nz) * dp
    xx, yy, zz = np.meshgrid(x, y, z, indexing="ij")
    pos = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])

    fp = cfg.fluid
    wave = cfg.wave
    vel = np.zeros_like(pos)
    if not cfg.at_rest:
        vel[:] = standing_wave_velocity(pos[:, 0], pos[:, 2], wave)
    fluid = ParticleSystem.from_positions(pos, fp.rho0, fp.rho0 * dp ** 3, velocity=vel)
    fluid.density[:] = _hydrostatic_density(pos[:, 2], fp)

    layers = build_bottom_layers((0.0, 0.0), (nx, ny), d, dp, h, fp.rho0)
    wall = layers.particles(_hydrostatic_density(layers.position[:, 2], fp))
    ps = ParticleSystem.concatenate([fluid, wall])
    ps.pressure[:] = -fp.rho0 * fp.g * ps.position[:, 2]

    bottom = -d - layers.layers * dp
    box = DomainBox((0.0, 0.0, bottom), (nx * dp, ny * dp, 0.5 * d), (True, True, False))
    return Scenario("hydrostatic" if cfg.at_rest else "standing_wave", ps, box, fp, h, dp,
                    cfg.correction, wave, cfg.t_end, gauges=(cfg.gauge_x,))


def standing_wave_velocity(x, z, wave: WaveParameters) -> np.ndarray:
    """Velocity of the standing wave at its maximum-velocity phase (flat surface)."""
    k, d = wave.wavenumber, wave.depth
    amp = wave.height * wave.gravity * k / (2.0 * wave.angular_frequency) / math.cosh(k * d)
    x, z = np.asarray(x, dtype=float), np.asarray(z, dtype=float)
    u = np.zeros(x.shape + (3,))
    u[..., 0] = amp * np.cosh(k * (d + z)) * np.sin(k * x)
    u[..., 2] = -amp * np.sinh(k * (d + z)) * np.cos(k * x)
    return u


def init_wave_tank(cfg: WaveTankConfig) -> Scenario:
    dp, d, h = cfg.dp, cfg.depth, cfg.h
    fp = cfg.fluid
    lj = cfg.lennard_jones
    wave = cfg.wave
    ny = _thickness(8.0, h, dp)
    width = ny * dp
    beach_end = cfg.flat_length + d / cfg.slope
    planes = tank_planes(d, cfg.flat_length, cfg.slope, lj)

    # lattice aligned with the still water level; the flap sits at x = 0
    nx = int(math.floor(beach_end / dp))
    nz = int(math.ceil(d / dp))
    x = (np.arange(nx) + 1.0) * dp
    z = -0.5 * dp - np.arange(nz) * dp
    xx, zz = np.meshgrid(x, z, indexing="ij")
    xz = np.column_stack([xx.ravel(), zz.ravel()])
    clear = np.ones(len(xz), dtype=bool)
    for plane in planes:
        n = np.asarray(plane.normal)
        dist = (xz[:, 0] - plane.point[0]) * n[0] + (xz[:, 1] - plane.point[2]) * n[2]
        clear &= dist >= lj.r0 - 1e-12
    xz = xz[clear]
    y = (np.arange(ny) + 0.5) * dp
    pos = np.column_stack([
        np.repeat(xz[:, 0], ny), np.tile(y, len(xz)), np.repeat(xz[:, 1], ny),
    ])
    fluid = ParticleSystem.from_positions(pos, fp.rho0, fp.rho0 * dp ** 3)
    fluid.density[:] = _hydrostatic_density(pos[:, 2], fp)

    freeboard = max(3.0 * cfg.height, 4.0 * dp)
    template = flap_template(dp, 0.0, ny, d + freeboard)
    flap = FlapWavemaker.for_wave(cfg.height, wave.wavenumber, d, wave.angular_frequency,
                                  cfg.ramp_periods * cfg.period, template)
    paddle = wavemaker_particles(flap, dp, fp.rho0)
    flap.indices = np.arange(len(paddle)) + len(fluid)
    ps = ParticleSystem.concatenate([fluid, paddle])
    ps.pressure[:] = np.where(ps.kind == Kind.FLUID, -fp.rho0 * fp.g * ps.position[:, 2], 0.0)

    box = DomainBox((-0.25 * d, 0.0, -d - 2.0 * h), (beach_end + 2.0 * h, width, 0.5 * d),
                    (False, True, False))
    return Scenario("wave_tank", ps, box, fp, h, dp, cfg.correction, wave, cfg.t_end,
                    gauges=tuple(cfg.gauges), planes=planes, lj=lj, wavemaker=flap)


def fluid_columns_over_x(ps: ParticleSystem, dp: float, x_edges) -> np.ndarray:
    """Fluid particle counts between successive x edges (used to check the beach taper)."""
    x = ps.position[ps.kind == Kind.FLUID, 0]
    counts, _ = np.histogram(x, bins=np.asarray(x_edges, dtype=float))
    return counts

