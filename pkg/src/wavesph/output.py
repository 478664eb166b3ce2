"""Plain-text writers and readers for particle snapshots and time series."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .diagnostics import TimeSeries
from .domain import ParticleSystem

SNAPSHOT_COLUMNS = ("x", "y", "z", "vx", "vy", "vz", "rho", "p", "m", "kind", "subset", "w")


class OutputError(OSError):
    pass


def _fmt(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else str(float(v))


def write_snapshot(ps: ParticleSystem, path, support: np.ndarray | None = None) -> None:
    """One header line, then one row per particle; floats round-trip exactly (17 digits)."""
    w = ps.support if support is None else support
    floats = np.column_stack([ps.position, ps.velocity, ps.density, ps.pressure, ps.mass])
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(" ".join(SNAPSHOT_COLUMNS) + "\n")
            for row, k, c, wi in zip(floats, ps.kind, ps.corrected, w):
                fh.write(" ".join(_fmt(v) for v in row))
                fh.write(f" {int(k)} {int(c)} {_fmt(wi)}\n")
    except OSError as exc:
        raise OutputError(f"cannot write snapshot {path}: {exc}") from exc


def read_snapshot(path) -> tuple[ParticleSystem, np.ndarray]:
    """Inverse of write_snapshot: the particle system (subset flags restored) and the w column."""
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if tuple(header) != SNAPSHOT_COLUMNS:
                raise OutputError(f"{path}: unexpected snapshot header {header}")
            rows = [line.split() for line in fh if line.strip()]
    except OSError as exc:
        raise OutputError(f"cannot read snapshot {path}: {exc}") from exc
    data = np.array([[float(v) for v in r] for r in rows]).reshape(-1, len(SNAPSHOT_COLUMNS))
    ps = ParticleSystem(
        position=data[:, 0:3], velocity=data[:, 3:6], density=data[:, 6], mass=data[:, 8],
        pressure=data[:, 7], kind=data[:, 9].astype(np.int8),
        corrected=data[:, 10].astype(bool), support=data[:, 11].copy(),
    )
    return ps, data[:, 11].copy()


def write_series(ts: TimeSeries, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,value\n")
            for t, v in zip(ts.times, ts.values):
                fh.write(f"{_fmt(t)},{_fmt(v)}\n")
    except OSError as exc:
        raise OutputError(f"cannot write series {path}: {exc}") from exc


def read_series(path, label: str = "") -> TimeSeries:
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "t,value":
                raise OutputError(f"{path}: unexpected series header {header!r}")
            rows = [line.strip().split(",") for line in fh if line.strip()]
    except OSError as exc:
        raise OutputError(f"cannot read series {path}: {exc}") from exc
    arr = np.array([[float(a), float(b)] for a, b in rows]).reshape(-1, 2)
    return TimeSeries(arr[:, 0], arr[:, 1], label or Path(path).stem)


def write_summary(values: dict, path) -> None:
    """key = value lines in insertion order."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for k, v in values.items():
                fh.write(f"{k} = {_fmt(v) if isinstance(v, float) else v}\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
