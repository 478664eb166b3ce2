"""Quintic Wendland kernel in 3D with support radius 2h."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

SIGMA = 21.0 / (16.0 * math.pi)
SUPPORT = 2.0  # in units of h


@njit(cache=True, inline="always")
def w_scalar(r, h):
    q = r / h
    if q >= 2.0:
        return 0.0
    t = 1.0 - 0.5 * q
    t2 = t * t
    return SIGMA / (h * h * h) * t2 * t2 * (2.0 * q + 1.0)


@njit(cache=True, inline="always")
def f_scalar(r, h):
    # (1/r) dW/dr; finite at r = 0
    q = r / h
    if q >= 2.0:
        return 0.0
    t = 1.0 - 0.5 * q
    h2 = h * h
    return -5.0 * SIGMA / (h2 * h2 * h) * t * t * t


def value(r, h: float):
    """Kernel value W(r, h); accepts scalars or arrays."""
    q = np.asarray(r, dtype=float) / h
    t = np.clip(1.0 - 0.5 * q, 0.0, None)
    out = SIGMA / h**3 * t**4 * (2.0 * q + 1.0)
    return out if out.ndim else float(out)


def grad_factor(r, h: float):
    """F = (1/r) dW/dr = -5 sigma (1 - q/2)^3 / h^5, zero beyond 2h."""
    q = np.asarray(r, dtype=float) / h
    t = np.clip(1.0 - 0.5 * q, 0.0, None)
    out = -5.0 * SIGMA / h**5 * t**3
    return out if out.ndim else float(out)


def grad(x_ij, h: float) -> np.ndarray:
    """Kernel gradient x_ij F(|x_ij|, h); x_ij may be one vector or an (n, 3) array."""
    x_ij = np.asarray(x_ij, dtype=float)
    r = np.linalg.norm(x_ij, axis=-1)
    return x_ij * np.expand_dims(grad_factor(r, h), -1)


class SmoothingKernel:
    """Wendland kernel bound to one smoothing length."""

    def __init__(self, h: float):
        if not h > 0.0:
            raise ValueError(f"smoothing length must be positive, got {h!r}")
        self.h = float(h)
        self.support_radius = SUPPORT * self.h
        self.sigma = SIGMA

    def value(self, r):
        return value(r, self.h)

    def grad_factor(self, r):
        return grad_factor(r, self.h)

    def grad(self, x_ij):
        return grad(x_ij, self.h)

    def __repr__(self) -> str:
        return f"SmoothingKernel(h={self.h!r})"
