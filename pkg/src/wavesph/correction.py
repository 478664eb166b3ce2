"""
Support-weighted symmetric kernel gradient correction, restricted by depth.

Per particle i in the corrected subset:

    w_i = sum_j V_j W_ij                           (self term included)
    A_i = -sum_j F_ij (x_ij (x) x_ij) V_j          (-> identity in the bulk)

and per interacting pair

    B_ij = (w_i + w_j) (A_i + A_j)^-1

where an uncorrected member enters with A = I. Pairs of two uncorrected
particles use B_ij = I, i.e. plain SPH.

The functions here work particle by particle and are meant for inspection and
testing; the solver uses the compiled sweeps in ``wavesph._sweeps``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .domain import DomainBox, Kind, ParticleSystem, minimum_image
from .kernel import SUPPORT, grad_factor, value
from .wave_theory import G

# |det(S)| below this fraction of (tr S / 3)^3 counts as singular
SINGULAR_RTOL = 1e-6


class CorrectionMode(str, enum.Enum):
    NONE = "none"
    FULL = "full"
    LOCALIZED = "localized"


@dataclass(frozen=True)
class CorrectionConfig:
    mode: CorrectionMode = CorrectionMode.NONE
    chi: float = math.inf
    wavelength: float = 1.0
    rho0: float = 1000.0
    g: float = G

    def __post_init__(self):
        object.__setattr__(self, "mode", CorrectionMode(self.mode))
        if not self.chi > 0.0:
            raise ValueError(f"chi must be positive, got {self.chi!r}")

    @property
    def pressure_threshold(self) -> float:
        """Particles with p <= chi * lambda * rho0 * g are eligible for correction."""
        if self.mode is CorrectionMode.FULL or math.isinf(self.chi):
            return math.inf
        return self.chi * self.wavelength * self.rho0 * self.g

    @property
    def enabled(self) -> bool:
        return self.mode is not CorrectionMode.NONE


def compute_support(i: int, neighbors, ps: ParticleSystem, h: float, box: DomainBox | None = None) -> float:
    """w_i over the given neighbor set, which should include i itself."""
    neighbors = np.asarray(neighbors, dtype=np.int64)
    d = _displacements(i, neighbors, ps, box)
    r = np.linalg.norm(d, axis=1)
    return float(np.sum(ps.volume[neighbors] * value(r, h)))


def compute_correction_matrix(i: int, neighbors, ps: ParticleSystem, h: float,
                              box: DomainBox | None = None) -> np.ndarray:
    neighbors = np.asarray(neighbors, dtype=np.int64)
    d = _displacements(i, neighbors, ps, box)
    r = np.linalg.norm(d, axis=1)
    coef = -grad_factor(r, h) * ps.volume[neighbors]
    return np.einsum("n,na,nb->ab", coef, d, d)


def _displacements(i, neighbors, ps, box):
    if box is None:
        return ps.position[i] - ps.position[neighbors]
    return minimum_image(ps.position[i], ps.position[neighbors], box)


def classify_subsets(ps: ParticleSystem, cfg: CorrectionConfig,
                     near_boundary: np.ndarray | None = None) -> np.ndarray:
    """
    Flag particles for correction from current pressures.

    near_boundary marks fluid particles with a boundary particle or plane
    within 2h; see ``boundary_proximity``.
    """
    if not cfg.enabled:
        flags = np.zeros(len(ps), dtype=np.bool_)
    else:
        flags = (ps.kind == Kind.FLUID) & (ps.pressure <= cfg.pressure_threshold)
        if near_boundary is not None:
            flags &= ~near_boundary
    ps.corrected[:] = flags
    return flags


def boundary_proximity(ps: ParticleSystem, box: DomainBox, h: float, planes=()) -> np.ndarray:
    """Fluid particles that have a non-fluid particle or a plane within 2h (brute force)."""
    near = np.zeros(len(ps), dtype=np.bool_)
    fluid = np.flatnonzero(ps.kind == Kind.FLUID)
    solid = np.flatnonzero(ps.kind != Kind.FLUID)
    reach = SUPPORT * h
    for i in fluid:
        if solid.size:
            d = minimum_image(ps.position[i], ps.position[solid], box)
            if np.min(np.einsum("ij,ij->i", d, d)) <= reach * reach:
                near[i] = True
                continue
        for plane in planes:
            if plane.distance(ps.position[i]) <= reach:
                near[i] = True
                break
    return near


def invert3(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Adjugate inverse of a 3x3 matrix; returns (inverse, determinant)."""
    a, b, c = m[0]
    d, e, f = m[1]
    g, hh, k = m[2]
    co = np.array([
        [e * k - f * hh, c * hh - b * k, b * f - c * e],
        [f * g - d * k, a * k - c * g, c * d - a * f],
        [d * hh - e * g, b * g - a * hh, a * e - b * d],
    ])
    det = a * co[0, 0] + b * co[1, 0] + c * co[2, 0]
    return co / det if det != 0.0 else co * np.nan, det


def is_singular(s: np.ndarray, det: float) -> bool:
    scale = abs(np.trace(s) / 3.0) ** 3
    return not abs(det) > SINGULAR_RTOL * scale


def pair_tensor(i: int, j: int, ps: ParticleSystem) -> np.ndarray:
    ci, cj = bool(ps.corrected[i]), bool(ps.corrected[j])
    if not (ci or cj):
        return np.eye(3)
    s = (ps.correction_matrix[i] if ci else np.eye(3)) + (ps.correction_matrix[j] if cj else np.eye(3))
    inv, det = invert3(s)
    if is_singular(s, det):
        return np.eye(3)
    return (ps.support[i] + ps.support[j]) * inv
