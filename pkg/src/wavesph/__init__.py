"""Weakly compressible SPH for water waves with depth-localized kernel gradient correction."""

from .correction import CorrectionConfig, CorrectionMode
from .domain import DomainBox, Kind, ParticleSystem
from .integrator import Solver, StepperState, compute_timestep
from .kernel import SmoothingKernel
from .physics import FluidProperties, LennardJones, PlaneBoundary, RateEvaluator, SimulationError
from .scenarios import StandingWaveConfig, WaveTankConfig, init_standing_wave, init_wave_tank
from .wave_theory import WaveParameters

__version__ = "0.1.0"

__all__ = [
    "CorrectionConfig", "CorrectionMode", "DomainBox", "FluidProperties", "Kind", "LennardJones",
    "ParticleSystem", "PlaneBoundary", "RateEvaluator", "SimulationError", "SmoothingKernel", "Solver",
    "StandingWaveConfig", "StepperState", "WaveParameters", "WaveTankConfig", "compute_timestep",
    "init_standing_wave", "init_wave_tank",
]
