"""Measurements on particle states and post-processing of recorded time series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Kind, ParticleSystem
from .wave_theory import theoretical_damping

PEAK_FLOOR = 1e-12


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        v = np.asarray(self.values, dtype=float).ravel()
        if t.shape != v.shape:
            raise ValueError(f"{len(t)} times but {len(v)} values")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be strictly ascending")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def span(self) -> float:
        return float(self.times[-1] - self.times[0]) if len(self) else 0.0

    def scaled(self, factor: float) -> "TimeSeries":
        return TimeSeries(self.times, self.values * factor, self.label)


class SeriesRecorder:
    """Accumulates samples and hands out a TimeSeries."""

    def __init__(self, label: str = ""):
        self.label = label
        self._t: list[float] = []
        self._v: list[float] = []

    def add(self, t: float, value: float) -> None:
        self._t.append(float(t))
        self._v.append(float(value))

    def series(self) -> TimeSeries:
        return TimeSeries(np.array(self._t), np.array(self._v), self.label)


def kinetic_energy(ps: ParticleSystem) -> float:
    """Sum of m |u|^2 / 2 over fluid particles."""
    f = ps.kind == Kind.FLUID
    u = ps.velocity[f]
    return 0.5 * float(np.sum(ps.mass[f] * np.einsum("ij,ij->i", u, u)))


def fluid_volume(ps: ParticleSystem) -> float:
    f = ps.kind == Kind.FLUID
    return float(np.sum(ps.mass[f] / ps.density[f]))


def velocity_rms(ps: ParticleSystem) -> float:
    u = ps.velocity[ps.kind == Kind.FLUID]
    if len(u) == 0:
        return 0.0
    return math.sqrt(float(np.mean(np.einsum("ij,ij->i", u, u))))


def max_density_deviation(ps: ParticleSystem, rho0: float) -> float:
    rho = ps.density[ps.kind == Kind.FLUID]
    return float(np.max(np.abs(rho - rho0))) if len(rho) else 0.0


def gauge_elevation(ps: ParticleSystem, x_gauge: float, half_width: float, dp: float,
                    period_x: float = 0.0) -> float:
    """
    Surface elevation at x_gauge: highest fluid particle within half_width of
    the gauge (all y) plus dp/2. NaN when the column is empty. period_x > 0
    measures the distance to the gauge periodically.
    """
    if not half_width > 0.0:
        raise ValueError("gauge half-width must be positive")
    f = ps.kind == Kind.FLUID
    dx = ps.position[f, 0] - x_gauge
    if period_x > 0.0:
        dx -= period_x * np.round(dx / period_x)
    z = ps.position[f, 2][np.abs(dx) <= half_width]
    if z.size == 0:
        return math.nan
    return float(np.max(z)) + 0.5 * dp


def detrend(series: TimeSeries, window: float) -> TimeSeries:
    """Subtract the centred moving average over [t - window/2, t + window/2], truncated at the ends."""
    if not window > 0.0:
        raise ValueError("window must be positive")
    if window > series.span * (1.0 + 1e-12):
        raise ValueError(f"window {window} exceeds the series span {series.span}")
    t, v = series.times, series.values
    # trapezoid running integral so uneven sampling is handled
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(t))])
    lo = np.maximum(t - 0.5 * window, t[0])
    hi = np.minimum(t + 0.5 * window, t[-1])
    mean = (np.interp(hi, t, cum) - np.interp(lo, t, cum)) / (hi - lo)
    return TimeSeries(t, v - mean, series.label)


@dataclass(frozen=True)
class DampingFit:
    beta: float
    amplitude: float
    residual: float
    peaks: int
    peak_times: tuple = ()


class FitError(ValueError):
    pass


def find_peaks(series: TimeSeries, min_separation: float = 0.0) -> np.ndarray:
    """
    Indices of strict local maxima above PEAK_FLOOR. With min_separation > 0 a
    peak must also be the largest sample within that distance on both sides.
    """
    v, t = series.values, series.times
    if len(v) < 3:
        return np.zeros(0, dtype=np.int64)
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]) & (v[1:-1] > PEAK_FLOOR)) + 1
    if min_separation > 0.0:
        keep = []
        for i in idx:
            lo = np.searchsorted(t, t[i] - min_separation, side="left")
            hi = np.searchsorted(t, t[i] + min_separation, side="right")
            if v[i] >= v[lo:hi].max():
                keep.append(i)
        idx = np.asarray(keep, dtype=np.int64)
    return idx


def fit_damping(series: TimeSeries, skip: float = 0.0, min_separation: float = 0.0) -> DampingFit:
    """
    Least-squares fit of ln(peak) = ln(amplitude) + beta t over the peaks of the
    series. Peaks earlier than times[0] + skip are left out.
    """
    idx = find_peaks(series, min_separation)
    if len(series):
        idx = idx[series.times[idx] >= series.times[0] + skip]
    if len(idx) < 3:
        raise FitError(f"need at least 3 peaks to fit a decay rate, found {len(idx)}")
    t = series.times[idx]
    y = np.log(series.values[idx])
    design = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sum((design @ coef - y) ** 2))
    return DampingFit(float(coef[1]), float(math.exp(coef[0])), resid, len(idx), tuple(t))


def damping_ratio(fit: DampingFit, nu: float, k: float) -> float:
    """beta / beta0 with beta0 = -4 nu k^2."""
    return fit.beta / theoretical_damping(nu, k)


def dominant_period(series: TimeSeries, oversample: int = 64) -> float:
    """
    Period of the strongest spectral line of a uniformly sampled series (mean
    removed, Hann window, zero padded by `oversample`).
    """
    t, v = series.times, series.values
    if len(t) < 4:
        raise ValueError("need at least four samples")
    dt = np.diff(t)
    if np.ptp(dt) > 1e-6 * dt.mean():
        raise ValueError("dominant_period needs uniform sampling")
    x = (v - v.mean()) * np.hanning(len(v))
    n = int(oversample) * len(v)
    amp = np.abs(np.fft.rfft(x, n))
    amp[0] = 0.0
    i = int(np.argmax(amp))
    if 0 < i < len(amp) - 1:
        # parabolic refinement on the log spectrum
        a, b, c = np.log(amp[i - 1:i + 2] + 1e-300)
        denom = a - 2.0 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0.0 else 0.0
    else:
        shift = 0.0
    freq = (i + shift) / (n * dt.mean())
    return 1.0 / freq


def wave_height(series: TimeSeries, t_start: float = -math.inf, t_stop: float = math.inf) -> float:
    """Mean crest-to-trough height over the zero-up-crossing waves in [t_start, t_stop]."""
    sel = (series.times >= t_start) & (series.times <= t_stop) & np.isfinite(series.values)
    v = series.values[sel]
    if len(v) < 3:
        return math.nan
    v = v - v.mean()
    up = np.flatnonzero((v[:-1] < 0.0) & (v[1:] >= 0.0))
    heights = [v[a:b + 1].max() - v[a:b + 1].min() for a, b in zip(up[:-1], up[1:])]
    return float(np.mean(heights)) if heights else math.nan


@dataclass
class PerfCounters:
    """Throughput in millions of particle updates per second, normalized to a reference step."""

    steps: int = 0
    particles: int = 0
    wall_time: float = 0.0
    simulated_time: float = 0.0
    dt_reference: float = 0.0

    @property
    def mean_dt(self) -> float:
        return self.simulated_time / self.steps if self.steps else 0.0

    @property
    def mipps(self) -> float:
        if self.wall_time <= 0.0:
            return 0.0
        raw = self.steps * self.particles / (self.wall_time * 1e6)
        scale = self.mean_dt / self.dt_reference if self.dt_reference > 0.0 else 1.0
        return raw * scale
