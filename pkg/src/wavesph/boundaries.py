"""
Boundary geometry: dynamic-boundary bottom layers, Lennard-Jones bottom planes
for the tank, and the bottom-hinged flap wavemaker.

The flap rotates about the y axis through its hinge; positive angles tilt the
top of the flap towards +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import Kind, ParticleSystem
from .kernel import SUPPORT
from .physics import LennardJones, PlaneBoundary
from .wave_theory import flap_stroke


def ramp(t: float, duration: float) -> float:
    """Smooth start 1/2 (1 - cos(pi t / duration)), 1 once t >= duration."""
    if duration <= 0.0 or t >= duration:
        return 1.0
    return 0.5 * (1.0 - math.cos(math.pi * t / duration))


def ramp_rate(t: float, duration: float) -> float:
    if duration <= 0.0 or t >= duration:
        return 0.0
    return 0.5 * math.pi / duration * math.sin(math.pi * t / duration)


@dataclass
class FlapWavemaker:
    """
    Rigid flap hinged at ``hinge`` (x, z). template holds flap-local offsets
    (xi, y, s): xi normal to the flap, y across the tank, s along the flap
    measured from the hinge. indices are the flap's rows in the particle system.
    """

    hinge: tuple
    theta0: float
    omega: float
    ramp_duration: float
    template: np.ndarray
    indices: np.ndarray = field(default=None)

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError(f"flap angular frequency must be positive, got {self.omega!r}")
        if self.ramp_duration < 0.0:
            raise ValueError("ramp duration must be non-negative")
        self.template = np.asarray(self.template, dtype=float).reshape(-1, 3)
        if self.indices is None:
            self.indices = np.arange(len(self.template))

    @classmethod
    def for_wave(cls, height: float, k: float, depth: float, omega: float, ramp_duration: float,
                 template, hinge_x: float = 0.0) -> "FlapWavemaker":
        """Flap hinged on the bottom whose steady stroke S gives the requested wave; theta0 = asin(S / 2d)."""
        theta0 = math.asin(flap_stroke(height, k, depth) / (2.0 * depth))
        return cls((hinge_x, -depth), theta0, omega, ramp_duration, template)

    def angle(self, t: float) -> float:
        return flap_angle(t, self)

    def angular_velocity(self, t: float) -> float:
        r, dr = ramp(t, self.ramp_duration), ramp_rate(t, self.ramp_duration)
        wt = self.omega * t
        return self.theta0 * (dr * math.sin(wt) + r * self.omega * math.cos(wt))

    def __call__(self, ps: ParticleSystem, t: float) -> None:
        move_wavemaker(ps, self, t)


def flap_angle(t: float, fw: FlapWavemaker) -> float:
    if t < 0.0:
        raise ValueError(f"time must be non-negative, got {t!r}")
    return ramp(t, fw.ramp_duration) * fw.theta0 * math.sin(fw.omega * t)


def move_wavemaker(ps: ParticleSystem, fw: FlapWavemaker, t: float) -> None:
    """Rigidly place the flap particles at angle theta(t) and give them the rigid-body velocity."""
    theta = flap_angle(t, fw)
    rate = fw.angular_velocity(t)
    c, s = math.cos(theta), math.sin(theta)
    xi, y, along = fw.template[:, 0], fw.template[:, 1], fw.template[:, 2]
    hx, hz = fw.hinge
    idx = fw.indices
    ps.position[idx, 0] = hx + xi * c + along * s
    ps.position[idx, 1] = y
    ps.position[idx, 2] = hz - xi * s + along * c
    ps.velocity[idx, 0] = rate * (-xi * s + along * c)
    ps.velocity[idx, 1] = 0.0
    ps.velocity[idx, 2] = rate * (-xi * c - along * s)


def flap_template(dp: float, y_lower: float, y_count: int, length: float) -> np.ndarray:
    """One column of particles spaced dp, from the hinge up to ``length`` along the flap."""
    n_s = int(math.floor(length / dp + 1e-9)) + 1
    s = np.arange(n_s) * dp
    y = y_lower + (np.arange(y_count) + 0.5) * dp
    yy, ss = np.meshgrid(y, s, indexing="ij")
    return np.column_stack([np.zeros(yy.size), yy.ravel(), ss.ravel()])


def wavemaker_particles(fw: FlapWavemaker, dp: float, rho0: float) -> ParticleSystem:
    """Flap particles at t = 0. They carry mass for bookkeeping only, never density."""
    part = ParticleSystem.from_positions(np.zeros((len(fw.template), 3)), rho0, rho0 * dp ** 3,
                                         kind=Kind.WAVEMAKER)
    fw.indices = np.arange(len(part))
    move_wavemaker(part, fw, 0.0)
    return part


def layer_count(h: float, dp: float) -> int:
    """Layers needed to fill the kernel support below the lowest fluid particle."""
    return int(math.ceil(SUPPORT * h / dp - 1e-9))


@dataclass
class DynamicBoundaryLayers:
    layers: int
    position: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("at least one boundary layer is required")

    def particles(self, density) -> ParticleSystem:
        """Boundary particles with the given density (scalar or one value per particle)."""
        n = len(self.position)
        ps = ParticleSystem.from_positions(self.position, 1.0, self.mass, kind=Kind.DYNAMIC_BOUNDARY)
        ps.density[:] = np.broadcast_to(np.asarray(density, dtype=float), (n,))
        ps.check()
        return ps


def build_bottom_layers(lower_xy, counts_xy, depth: float, dp: float, h: float,
                        rho0: float = 1000.0) -> DynamicBoundaryLayers:
    """
    ceil(2h/dp) layers of particles below z = -depth, on the same x-y columns
    as the fluid (cell-centred from lower_xy, counts_xy columns). The first
    layer sits dp/2 below the bottom, one full spacing from the lowest fluid
    particle at -depth + dp/2.
    """
    if not (dp > 0.0 and h > 0.0):
        raise ValueError("particle spacing and smoothing length must be positive")
    nl = layer_count(h, dp)
    nx, ny = (int(c) for c in counts_xy)
    x = lower_xy[0] + (np.arange(nx) + 0.5) * dp
    y = lower_xy[1] + (np.arange(ny) + 0.5) * dp
    z = -depth - 0.5 * dp - np.arange(nl) * dp
    xx, yy, zz = np.meshgrid(x, y, z, indexing="ij")
    pos = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])
    return DynamicBoundaryLayers(nl, pos, np.full(len(pos), rho0 * dp ** 3))


def tank_planes(depth: float, flat_length: float, slope: float, lj: LennardJones) -> tuple:
    """
    Flat bottom z = -depth and a plane rising with the given slope from
    x = flat_length. Both planes pass through (flat_length, -depth), so the
    bottom has no gap at the junction.
    """
    junction = (flat_length, 0.0, -depth)
    flat = PlaneBoundary(junction, (0.0, 0.0, 1.0), lj)
    rising = PlaneBoundary(junction, (-slope, 0.0, 1.0), lj)
    return flat, rising


def bottom_height(x, depth: float, flat_length: float, slope: float):
    """z of the tank bottom at horizontal position x."""
    x = np.asarray(x, dtype=float)
    return -depth + slope * np.clip(x - flat_length, 0.0, None)
