"""
Weakly compressible SPH right-hand sides.

    drho_i/dt = sum_j u_ij . x_ij F_ij m_j - xi h c0 sum_j Psi_ij F_ij m_j
    du_i/dt   = -sum_j (p_i/rho_i^2 + p_j/rho_j^2 + Pi_ij) B_ij x_ij F_ij m_j + g
    p         = c0^2 rho0 / gamma ((rho/rho0)^gamma - 1)

with x_ij = x_i - x_j, u_ij = u_i - u_j and F = (1/r) dW/dr < 0. Boundary
particles of the dynamic kind take part in both sums; wavemaker particles and
planes act through a Lennard-Jones repulsion instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _sweeps
from .correction import SINGULAR_RTOL, CorrectionConfig, pair_tensor
from .domain import DomainBox, Kind, PairList, ParticleSystem, minimum_image
from .kernel import grad_factor
from .wave_theory import G


class SimulationError(RuntimeError):
    """Raised when the particle state stops being physical (NaN, non-positive density)."""


@dataclass(frozen=True)
class FluidProperties:
    rho0: float = 1000.0
    c0: float = 89.0
    gamma: float = 7.0
    nu: float = 1e-6
    xi: float = 0.1
    eps: float = 0.01
    gravity: tuple = (0.0, 0.0, -G)

    def __post_init__(self):
        for name in ("rho0", "c0", "gamma", "nu", "xi", "eps"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def g(self) -> float:
        return float(np.linalg.norm(self.gravity))

    def alpha(self, h: float) -> float:
        """Artificial viscosity coefficient equivalent to the kinematic viscosity nu."""
        return 10.0 * self.nu / (h * self.c0)

    @property
    def pressure_floor(self) -> float:
        return -self.c0 ** 2 * self.rho0 / self.gamma


@dataclass(frozen=True)
class LennardJones:
    strength: float
    r0: float
    p1: int = 12
    p2: int = 4

    def __post_init__(self):
        if not self.p1 > self.p2 > 0:
            raise ValueError("Lennard-Jones exponents need p1 > p2 > 0")
        if not (self.strength > 0.0 and self.r0 > 0.0):
            raise ValueError("Lennard-Jones strength and range must be positive")

    def magnitude(self, r: float) -> float:
        """D [(r0/r)^p1 - (r0/r)^p2] for r < r0, else 0."""
        if r >= self.r0:
            return 0.0
        q = self.r0 / r
        return self.strength * (q ** self.p1 - q ** self.p2)


@dataclass(frozen=True)
class PlaneBoundary:
    point: tuple
    normal: tuple
    lj: LennardJones

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(n)
        if not norm > 0.0:
            raise ValueError("plane normal must be non-zero")
        object.__setattr__(self, "normal", tuple(n / norm))
        object.__setattr__(self, "point", tuple(float(v) for v in self.point))

    def distance(self, x) -> float:
        return float(np.dot(np.subtract(x, self.point), self.normal))


@dataclass
class Counters:
    singular_pairs: int = 0
    lj_clamps: int = 0


def eos_pressure(rho, fp: FluidProperties):
    return fp.c0 ** 2 * fp.rho0 / fp.gamma * ((np.asarray(rho) / fp.rho0) ** fp.gamma - 1.0)


def eos_density(p, fp: FluidProperties):
    p = np.asarray(p, dtype=float)
    if np.any(p <= fp.pressure_floor):
        raise ValueError(f"pressure must exceed {fp.pressure_floor:.6g} Pa")
    rho = fp.rho0 * (1.0 + fp.gamma * p / (fp.c0 ** 2 * fp.rho0)) ** (1.0 / fp.gamma)
    return rho if rho.ndim else float(rho)


def density_diffusion_term(i: int, j: int, ps: ParticleSystem, fp: FluidProperties) -> float:
    """Psi_ij = 2 (rho_j/rho_i - 1) if |p_i - p_j| > rho_i g |z_i - z_j|, else 0."""
    dz = abs(ps.position[i, 2] - ps.position[j, 2])
    if abs(ps.pressure[i] - ps.pressure[j]) > ps.density[i] * fp.g * dz:
        return 2.0 * (ps.density[j] / ps.density[i] - 1.0)
    return 0.0


def artificial_viscosity(i: int, j: int, ps: ParticleSystem, fp: FluidProperties, h: float,
                         box: DomainBox | None = None) -> float:
    x_ij = _disp(ps, i, j, box)
    u_ij = ps.velocity[i] - ps.velocity[j]
    ux = float(np.dot(u_ij, x_ij))
    if ux >= 0.0:
        return 0.0
    rho_bar = 0.5 * (ps.density[i] + ps.density[j])
    return -fp.alpha(h) * h * fp.c0 / rho_bar * ux / (float(np.dot(x_ij, x_ij)) + fp.eps * h * h)


def _disp(ps, i, j, box):
    if box is None:
        return ps.position[i] - ps.position[j]
    return minimum_image(ps.position[i], ps.position[j], box)


def continuity_rhs(i: int, neighbors, ps: ParticleSystem, fp: FluidProperties, h: float,
                   box: DomainBox | None = None) -> float:
    total = 0.0
    for j in neighbors:
        if j == i or ps.kind[j] == Kind.WAVEMAKER:
            continue
        x_ij = _disp(ps, i, j, box)
        f = grad_factor(np.linalg.norm(x_ij), h)
        u_ij = ps.velocity[i] - ps.velocity[j]
        total += float(np.dot(u_ij, x_ij)) * f * ps.mass[j]
        total -= fp.xi * h * fp.c0 * density_diffusion_term(i, j, ps, fp) * f * ps.mass[j]
    return total


def momentum_rhs(i: int, neighbors, ps: ParticleSystem, fp: FluidProperties, h: float,
                 box: DomainBox | None = None, use_correction: bool = True,
                 include_gravity: bool = True) -> np.ndarray:
    """Pressure, viscosity and gravity acceleration of particle i (no Lennard-Jones terms)."""
    a = np.zeros(3)
    pi = ps.pressure[i] / ps.density[i] ** 2
    for j in neighbors:
        if j == i or ps.kind[j] == Kind.WAVEMAKER:
            continue
        x_ij = _disp(ps, i, j, box)
        f = grad_factor(np.linalg.norm(x_ij), h)
        coef = pi + ps.pressure[j] / ps.density[j] ** 2 + artificial_viscosity(i, j, ps, fp, h, box)
        b = pair_tensor(i, j, ps) if use_correction else np.eye(3)
        a -= coef * (b @ x_ij) * f * ps.mass[j]
    if include_gravity:
        a += np.asarray(fp.gravity)
    return a


def lj_plane_acceleration(x, plane: PlaneBoundary, counters: Counters | None = None) -> np.ndarray:
    r = plane.distance(x)
    lj = plane.lj
    if r >= lj.r0:
        return np.zeros(3)
    if r <= 0.0:
        r = 0.01 * lj.r0
        if counters is not None:
            counters.lj_clamps += 1
    return lj.magnitude(r) / r * np.asarray(plane.normal)


def lj_particle_acceleration(x_i, x_j, lj: LennardJones, counters: Counters | None = None) -> np.ndarray:
    x_ij = np.subtract(x_i, x_j, dtype=float)
    r = float(np.linalg.norm(x_ij))
    if r >= lj.r0:
        return np.zeros(3)
    if r < 0.01 * lj.r0:
        r = 0.01 * lj.r0
        if counters is not None:
            counters.lj_clamps += 1
    return lj.magnitude(r) * x_ij / (r * r)


@dataclass
class RateEvaluator:
    """
    Evaluates density rates and accelerations of a whole particle system.

    One evaluation runs: equation of state, subset classification, supports and
    corrective matrices (only when correction is enabled), then the pair sweep.
    """

    fluid: FluidProperties
    h: float
    correction: CorrectionConfig = field(default_factory=CorrectionConfig)
    planes: tuple = ()
    lj: LennardJones | None = None
    counters: Counters = field(default_factory=Counters)

    def __post_init__(self):
        self.planes = tuple(self.planes)
        if self.planes:
            self._plane_points = np.array([p.point for p in self.planes], dtype=float)
            self._plane_normals = np.array([p.normal for p in self.planes], dtype=float)
            self._plane_d = np.array([p.lj.strength for p in self.planes], dtype=float)
            self._plane_r0 = np.array([p.lj.r0 for p in self.planes], dtype=float)
            self._plane_p1 = np.array([p.lj.p1 for p in self.planes], dtype=np.int64)
            self._plane_p2 = np.array([p.lj.p2 for p in self.planes], dtype=np.int64)
        self._near = None
        self._ext = None
        self._cnt = np.zeros(2, dtype=np.int64)

    def near_boundary(self, ps: ParticleSystem, box: DomainBox, pairs: PairList) -> np.ndarray:
        if self._near is None or len(self._near) != len(ps):
            self._near = np.zeros(len(ps), dtype=np.bool_)
        _sweeps.boundary_proximity(ps.position, ps.kind, pairs.offsets, pairs.neighbors,
                                   pairs.image, pairs.shifts, self.h, self._near)
        if self.planes:
            reach = 2.0 * self.h
            for pt, nm in zip(self._plane_points, self._plane_normals):
                dist = (ps.position - pt) @ nm
                self._near |= (dist <= reach) & (ps.kind == Kind.FLUID)
        return self._near

    def classify(self, ps: ParticleSystem, box: DomainBox, pairs: PairList) -> np.ndarray:
        if not self.correction.enabled:
            ps.corrected[:] = False
            return ps.corrected
        near = self.near_boundary(ps, box, pairs)
        np.logical_and(ps.kind == Kind.FLUID, ps.pressure <= self.correction.pressure_threshold,
                       out=ps.corrected)
        ps.corrected &= ~near
        return ps.corrected

    def __call__(self, ps: ParticleSystem, box: DomainBox, pairs: PairList) -> None:
        fp = self.fluid
        carries = ps.kind != Kind.WAVEMAKER
        ps.pressure[:] = np.where(carries, eos_pressure(ps.density, fp), 0.0)
        self.classify(ps, box, pairs)
        use = self.correction.enabled
        if use:
            _sweeps.support_and_matrix(ps.position, ps.density, ps.mass, ps.kind, ps.corrected,
                                       pairs.offsets, pairs.neighbors, pairs.image, pairs.shifts, self.h,
                                       ps.support, ps.correction_matrix)
        if self._ext is None or len(self._ext) != len(ps):
            self._ext = np.zeros((len(ps), 3))
        lj = self.lj or LennardJones(1.0, 1e-300)
        self._cnt[:] = 0
        _sweeps.rates(ps.position, ps.velocity, ps.density, ps.mass, ps.pressure, ps.kind,
                      ps.corrected, ps.support, ps.correction_matrix, pairs.offsets, pairs.neighbors,
                      pairs.image, pairs.shifts, self.h, fp.c0, fp.xi, fp.alpha(self.h) * self.h * fp.c0, fp.eps, fp.g,
                      use, SINGULAR_RTOL, lj.strength, lj.r0, lj.p1, lj.p2,
                      ps.acceleration, self._ext, ps.density_rate, self._cnt)
        if self.planes:
            _sweeps.plane_push(ps.position, ps.kind, self._plane_points, self._plane_normals,
                               self._plane_d, self._plane_r0, self._plane_p1, self._plane_p2,
                               self._ext, self._cnt)
        self.counters.singular_pairs += int(self._cnt[0])
        self.counters.lj_clamps += int(self._cnt[1])
        fluid = ps.kind == Kind.FLUID
        ps.acceleration[fluid] += self._ext[fluid] + np.asarray(fp.gravity)
        self._check(ps)

    def internal_momentum(self, ps: ParticleSystem) -> np.ndarray:
        """Sum of m a over the pressure and viscosity part of the last evaluation."""
        internal = ps.acceleration.copy()
        fluid = ps.kind == Kind.FLUID
        internal[fluid] -= self._ext[fluid] + np.asarray(self.fluid.gravity)
        return (ps.mass[:, None] * internal).sum(axis=0)

    @staticmethod
    def _check(ps: ParticleSystem) -> None:
        bad = ~(np.isfinite(ps.acceleration).all(axis=1) & np.isfinite(ps.density_rate))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise SimulationError(
                f"non-finite rate at particle {i} (kind {int(ps.kind[i])}, position {ps.position[i]},"
                f" density {ps.density[i]!r})"
            )
