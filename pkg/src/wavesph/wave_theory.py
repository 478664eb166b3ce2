"""
Linear (Airy) wave theory.

Coordinates follow the usual water-wave convention: x along the direction of
propagation, z positive up with z = 0 at the still water level and the bottom
at z = -d.

    omega^2 = g * k * tanh(k * d)                 dispersion relation
    u_x = H g k / (2 omega) cosh(k(d+z))/cosh(kd) cos(kx - omega t)
    u_z = H g k / (2 omega) sinh(k(d+z))/cosh(kd) sin(kx - omega t)
    p   = -rho g z + rho g eta cosh(k(d+z))/cosh(kd)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

G = 9.81

_TWO_PI = 2.0 * math.pi


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0.0 or not math.isfinite(value):
            raise ValueError(f"{name} must be a positive finite number, got {value!r}")


def omega_from_wavelength(wavelength: float, depth: float, g: float = G) -> float:
    """Angular frequency of a linear wave of given length in water of given depth."""
    _require_positive(wavelength=wavelength, depth=depth, g=g)
    k = _TWO_PI / wavelength
    return math.sqrt(g * k * math.tanh(k * depth))


def wavenumber_from_period(period: float, depth: float, g: float = G,
                           max_iter: int = 100) -> float:
    """
    Solve the dispersion relation for the wavenumber k given the period.

    Newton iteration from the deep-water guess k0 = omega^2/g. The residual
    g k tanh(kd) - omega^2 is monotone increasing in k, so any Newton step that
    leaves the current bracket is replaced by a bisection step.
    """
    _require_positive(period=period, depth=depth, g=g)
    omega2 = (_TWO_PI / period) ** 2
    k0 = omega2 / g
    lo, hi = 1e-8 * k0, 1e4 * k0

    def residual(k: float) -> float:
        return g * k * math.tanh(k * depth) - omega2

    k = k0
    tol = 1e-12 * omega2
    for _ in range(max_iter):
        f = residual(k)
        if abs(f) < tol:
            return k
        if f > 0.0:
            hi = min(hi, k)
        else:
            lo = max(lo, k)
        th = math.tanh(k * depth)
        df = g * (th + k * depth * (1.0 - th * th))
        k_new = k - f / df if df > 0.0 else 0.5 * (lo + hi)
        if not lo < k_new < hi:
            k_new = 0.5 * (lo + hi)
        k = k_new
    if abs(residual(k)) < tol:
        return k
    raise ArithmeticError(
        f"dispersion solve did not converge for T={period}, d={depth} after {max_iter} iterations"
    )


@dataclass(frozen=True)
class WaveParameters:
    """A monochromatic linear wave; build it with from_wavelength or from_period."""

    wavelength: float
    wavenumber: float
    angular_frequency: float
    period: float
    height: float
    depth: float
    gravity: float = G

    @classmethod
    def from_wavelength(cls, wavelength: float, height: float, depth: float,
                        g: float = G) -> "WaveParameters":
        _require_positive(height=height)
        omega = omega_from_wavelength(wavelength, depth, g)
        return cls(wavelength, _TWO_PI / wavelength, omega, _TWO_PI / omega,
                   height, depth, g)

    @classmethod
    def from_period(cls, period: float, height: float, depth: float,
                    g: float = G) -> "WaveParameters":
        _require_positive(height=height)
        k = wavenumber_from_period(period, depth, g)
        return cls(_TWO_PI / k, k, _TWO_PI / period, period, height, depth, g)

    @property
    def phase_velocity(self) -> float:
        return self.angular_frequency / self.wavenumber

    @property
    def kd(self) -> float:
        return self.wavenumber * self.depth

    @property
    def is_deep_water(self) -> bool:
        return self.depth / self.wavelength > 0.5

    @property
    def is_shallow_water(self) -> bool:
        return self.depth / self.wavelength < 0.05

    def dispersion_residual(self) -> float:
        """Relative residual |omega^2 - g k tanh(kd)| / omega^2."""
        w2 = self.angular_frequency ** 2
        return abs(w2 - self.gravity * self.wavenumber * math.tanh(self.kd)) / w2


def orbital_velocity(x: float, z: float, t: float, w: WaveParameters) -> tuple[float, float]:
    """Horizontal and vertical particle velocity of a progressive wave at (x, z, t)."""
    k, d = w.wavenumber, w.depth
    amp = w.height * w.gravity * k / (2.0 * w.angular_frequency) / math.cosh(k * d)
    phase = k * x - w.angular_frequency * t
    return (amp * math.cosh(k * (d + z)) * math.cos(phase),
            amp * math.sinh(k * (d + z)) * math.sin(phase))


def linear_pressure(x: float, z: float, t: float, eta: float, w: WaveParameters,
                    rho: float) -> float:
    """Hydrostatic plus dynamic pressure under a surface elevation eta.

    x and t only enter through eta, which the caller supplies.
    """
    k, d = w.wavenumber, w.depth
    return -rho * w.gravity * z + rho * w.gravity * eta * math.cosh(k * (d + z)) / math.cosh(k * d)


def theoretical_damping(nu: float, k: float) -> float:
    """Viscous decay rate -4 nu k^2 of standing-wave kinetic energy."""
    return -4.0 * nu * k * k


def theoretical_kinetic_energy(t: float, w: WaveParameters, rho: float, nu: float) -> float:
    """
    Kinetic energy per unit width of a viscous standing wave of height w.height.

    eps^2 rho g (lambda d^2 / 32) exp(-4 nu k^2 t) (1 + cos(2 omega t)), eps = H/d.
    """
    eps = w.height / w.depth
    envelope = eps * eps * rho * w.gravity * w.wavelength * w.depth ** 2 / 32.0
    return (envelope * math.exp(theoretical_damping(nu, w.wavenumber) * t)
            * (1.0 + math.cos(2.0 * w.angular_frequency * t)))


def reynolds_number(depth: float, nu: float, g: float = G) -> float:
    """Wave Reynolds number built on the hydrostatic velocity sqrt(2 g d)."""
    return math.sqrt(2.0 * g * depth) * depth / nu


def flap_transfer(kd: float) -> float:
    """
    Height-to-stroke ratio H/S of a flap hinged at the bottom.

    4 (sinh kd / kd) (kd sinh kd - cosh kd + 1) / (sinh 2kd + 2kd), written in
    terms of tanh and sech so it stays finite for large kd.
    """
    _require_positive(kd=kd)
    th = math.tanh(kd)
    sech = 1.0 / math.cosh(kd) if kd < 700.0 else 0.0
    return 4.0 * th * (kd * th - 1.0 + sech) / (kd * (2.0 * th + 2.0 * kd * sech * sech))


def flap_stroke(height: float, k: float, depth: float) -> float:
    """Peak-to-peak flap excursion at the still water level for a target wave height."""
    _require_positive(height=height, k=k, depth=depth)
    return height / flap_transfer(k * depth)
