"""
Adaptive time stepping and the midpoint predictor-corrector.

One step of length dt:

    a0, rho0'  = rates(t)
    u* = u + dt/2 a0,   x* = x + dt/2 u,   rho* = rho + dt/2 rho0'
    a*, rho*'  = rates(t + dt/2)
    u1 = u + dt a*,     rho1 = rho + dt rho*',   x1 = x + dt (u + u1) / 2

Fluid particles move; dynamic boundary particles only update density;
wavemaker particles are overwritten by their prescribed motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import DomainBox, Kind, PairList, ParticleSystem
from .physics import SimulationError

GROWTH_CAP = 1.1


@dataclass
class StepperState:
    t: float = 0.0
    step: int = 0
    dt: float = math.inf
    cfl: float = 0.3

    def __post_init__(self):
        if not self.t >= 0.0:
            raise ValueError(f"time must be non-negative, got {self.t!r}")
        if not self.cfl > 0.0:
            raise ValueError(f"CFL factor must be positive, got {self.cfl!r}")


def compute_timestep(ps: ParticleSystem, h: float, c0: float, cfl: float = 0.3,
                     mask: np.ndarray | None = None) -> float:
    """
    min_i min(cfl sqrt(h/|a_i|), cfl h/c0) over the particles selected by mask
    (all particles by default). Zero accelerations leave the acoustic bound.
    """
    acoustic = cfl * h / c0
    acc = ps.acceleration if mask is None else ps.acceleration[mask]
    if len(acc) == 0:
        return acoustic
    amax = float(np.sqrt(np.max(np.einsum("ij,ij->i", acc, acc))))
    if not math.isfinite(amax):
        raise SimulationError("non-finite acceleration while computing the time step")
    if amax == 0.0:
        return acoustic
    return min(cfl * math.sqrt(h / amax), acoustic)


Rates = Callable[[ParticleSystem, DomainBox, PairList], None]
Kinematics = Callable[[ParticleSystem, float], None]


class Solver:
    """
    Drives a particle system through time.

    rates(ps, box, pairs) must fill ps.acceleration and ps.density_rate.
    kinematics(ps, t), if given, overwrites prescribed particles (the flap).
    With fixed_dt set the CFL estimate and the growth cap are bypassed.
    """

    def __init__(self, ps: ParticleSystem, box: DomainBox, rates: Rates, h: float, c0: float,
                 kinematics: Kinematics | None = None, cfl: float = 0.3, skin: float | None = None,
                 fixed_dt: float | None = None, t0: float = 0.0):
        self.ps = ps
        self.box = box
        self.rates = rates
        self.h = float(h)
        self.c0 = float(c0)
        self.kinematics = kinematics
        self.skin = 0.25 * self.h if skin is None else float(skin)
        self.fixed_dt = fixed_dt
        self.state = StepperState(t=t0, cfl=cfl)
        self.rebuilds = 0
        self._moving = ps.kind == Kind.FLUID
        self._carries = ps.kind != Kind.WAVEMAKER
        box.check_smoothing_length(self.h)
        self._prescribe(t0)
        self.pairs = self._build()
        self._evaluate()
        # rates are current for the state at t0, so the first step can reuse them
        self._fresh = True
        self.state.dt = self._next_dt(math.inf)

    def _build(self) -> PairList:
        self.rebuilds += 1
        return PairList.build(self.ps, self.box, self.h, self.skin)

    def _prescribe(self, t: float) -> None:
        if self.kinematics is not None:
            self.kinematics(self.ps, t)

    def _evaluate(self) -> None:
        try:
            self.rates(self.ps, self.box, self.pairs)
        except SimulationError as exc:
            raise SimulationError(f"step {self.state.step}, t = {self.state.t:.9g}: {exc}") from exc

    def _next_dt(self, previous: float) -> float:
        if self.fixed_dt is not None:
            return float(self.fixed_dt)
        dt = compute_timestep(self.ps, self.h, self.c0, self.state.cfl, self._moving)
        return min(dt, GROWTH_CAP * previous)

    def step(self, dt: float | None = None) -> float:
        """Advance by one step; dt overrides the scheduled step (e.g. to land on an end time)."""
        ps, st = self.ps, self.state
        scheduled = st.dt
        dt = scheduled if dt is None else float(dt)
        if not dt > 0.0:
            raise ValueError(f"time step must be positive, got {dt!r}")
        mv, cr = self._moving, self._carries
        if not self._fresh:
            self._evaluate()
        self._fresh = False
        x0 = ps.position[mv]
        u0 = ps.velocity[mv]
        rho0 = ps.density[cr]

        ps.velocity[mv] = u0 + 0.5 * dt * ps.acceleration[mv]
        ps.position[mv] = x0 + 0.5 * dt * u0
        ps.density[cr] = rho0 + 0.5 * dt * ps.density_rate[cr]
        self._check_density(cr)
        self._prescribe(st.t + 0.5 * dt)
        self._evaluate()

        u1 = u0 + dt * ps.acceleration[mv]
        ps.velocity[mv] = u1
        ps.position[mv] = x0 + 0.5 * dt * (u0 + u1)
        ps.density[cr] = rho0 + dt * ps.density_rate[cr]
        self._check_density(cr)
        self._check_state()

        st.t += dt
        st.step += 1
        # cap growth against the scheduled step so a shortened final step does not throttle the next
        st.dt = self._next_dt(max(dt, scheduled))
        self._prescribe(st.t)
        if self.pairs.stale(ps.position):
            self.pairs = self._build()
        return dt

    def advance(self, t_end: float, callback: Callable[["Solver"], None] | None = None) -> None:
        """Step until t_end, shortening the last step to land on it exactly."""
        while self.state.t < t_end:
            remaining = t_end - self.state.t
            dt = self.state.dt
            landing = remaining <= dt * (1.0 + 1e-9)
            self.step(remaining if landing else dt)
            if landing:
                # t + (t_end - t) can miss t_end by an ulp
                self.state.t = float(t_end)
            if callback is not None:
                callback(self)

    def _check_density(self, mask: np.ndarray) -> None:
        rho = self.ps.density[mask]
        if not np.all(rho > 0.0):
            i = int(np.flatnonzero(mask)[np.flatnonzero(~(rho > 0.0))[0]])
            raise SimulationError(
                f"step {self.state.step}, t = {self.state.t:.9g}: density of particle {i}"
                f" became {self.ps.density[i]!r}"
            )

    def _check_state(self) -> None:
        ps = self.ps
        bad = ~(np.isfinite(ps.position).all(axis=1) & np.isfinite(ps.velocity).all(axis=1))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise SimulationError(
                f"step {self.state.step}, t = {self.state.t:.9g}: particle {i} has position"
                f" {ps.position[i]} and velocity {ps.velocity[i]}"
            )
