"""Run orchestration: build the scenario, step to t_end, write series, snapshots and summaries."""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _sweeps
from .config import RunConfig, ScenarioName
from .correction import CorrectionMode
from .diagnostics import (FitError, PerfCounters, SeriesRecorder, TimeSeries, damping_ratio,
                          dominant_period, fit_damping, fluid_volume, gauge_elevation, kinetic_energy,
                          max_density_deviation, velocity_rms, wave_height)
from .integrator import Solver
from .output import write_series, write_snapshot, write_summary
from .physics import SimulationError
from .scenarios import (Scenario, StandingWaveConfig, WaveTankConfig, init_standing_wave,
                        init_wave_tank)

log = logging.getLogger(__name__)


def build_scenario(cfg: RunConfig) -> Scenario:
    if cfg.scenario is ScenarioName.WAVE_TANK:
        return init_wave_tank(WaveTankConfig(
            t_end=cfg.t_end, dp=cfg.dp, h_factor=cfg.h_factor, flat_length=cfg.tank_length,
            correction=cfg.correction, gauges=cfg.gauges))
    sw = StandingWaveConfig(t_end=cfg.t_end, dp=cfg.dp, h_factor=cfg.h_factor, correction=cfg.correction,
                            at_rest=cfg.scenario is ScenarioName.HYDROSTATIC)
    sc = init_standing_wave(sw)
    if cfg.gauges is not None:
        sc.gauges = cfg.gauges
    return sc


@dataclass
class RunResult:
    status: int
    scenario: Scenario
    energy: TimeSeries
    gauges: list
    summary: dict
    perf: PerfCounters
    error: str = ""
    snapshots: list = field(default_factory=list)


def _support_for_snapshot(solver: Solver) -> np.ndarray:
    ps, pairs = solver.ps, solver.pairs
    w = np.zeros(len(ps))
    _sweeps.all_supports(ps.position, ps.density, ps.mass, ps.kind, pairs.offsets, pairs.neighbors,
                         pairs.image, pairs.shifts, solver.h, w)
    return w


def run(cfg: RunConfig, write: bool = True) -> RunResult:
    """
    Execute one configured run. Exit status 0 on completion, 2 on a numerical
    abort (partial outputs and failure.txt are still written).
    """
    out = Path(cfg.out)
    if write:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(cfg.to_text(), encoding="utf-8")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sc = build_scenario(cfg)
    ps = sc.ps
    period_x = sc.box.lengths[0] if sc.box.periodic[0] else 0.0

    energy = SeriesRecorder("kinetic_energy")
    gauges = [SeriesRecorder(f"gauge_{x:g}") for x in sc.gauges]
    volume0 = fluid_volume(ps)
    snapshots = []
    perf = PerfCounters(particles=len(ps), dt_reference=cfg.cfl * 1.3 * sc.dp / sc.fluid.c0)

    def sample(t: float) -> None:
        energy.add(t, kinetic_energy(ps))
        for rec, x in zip(gauges, sc.gauges):
            rec.add(t, gauge_elevation(ps, x, sc.dp, sc.dp, period_x))

    def snapshot(solver: Solver, index: int) -> None:
        if write:
            path = out / f"snapshot_{index:05d}.txt"
            write_snapshot(ps, path, _support_for_snapshot(solver))
            snapshots.append(path)

    status, error = 0, ""
    solver = None
    try:
        solver = sc.solver(cfl=cfg.cfl)
        sample(0.0)
        snapshot(solver, 0)
        n_out, n_snap = 1, 1
        snap_every = cfg.snapshot_interval if cfg.snapshot_interval is not None else math.inf
        wall0 = time.perf_counter()
        while solver.state.t < cfg.t_end:
            t_out = min(n_out * cfg.output_interval, cfg.t_end)
            t_snap = min(n_snap * snap_every, cfg.t_end)
            target = min(t_out, t_snap)
            solver.advance(target)
            perf.wall_time = time.perf_counter() - wall0
            if target == t_out:
                sample(solver.state.t)
                n_out += 1
            if target == t_snap and math.isfinite(snap_every):
                snapshot(solver, n_snap)
                n_snap += 1
            if n_out % 50 == 0:
                log.info("t = %.4f, step %d, dt = %.3e", solver.state.t, solver.state.step, solver.state.dt)
        if cfg.t_end > 0.0 and not math.isfinite(snap_every):
            snapshot(solver, 1)
    except SimulationError as exc:
        status, error = 2, str(exc)
        log.error("run aborted: %s", exc)
    finally:
        if solver is not None:
            perf.steps = solver.state.step
            perf.simulated_time = solver.state.t

    energy_ts = energy.series()
    gauge_ts = [g.series() for g in gauges]
    summary = _summarize(cfg, sc, energy_ts, gauge_ts, volume0, solver)
    summary["status"] = "completed" if status == 0 else "aborted"
    if write:
        write_series(energy_ts, out / "energy.csv")
        for x, ts in zip(sc.gauges, gauge_ts):
            write_series(ts, out / f"gauge_{x:g}.csv")
        write_summary(summary, out / "summary.txt")
        write_summary({
            "steps": perf.steps, "particles": perf.particles, "wall_time": perf.wall_time,
            "mean_dt": perf.mean_dt, "dt_reference": perf.dt_reference, "mipps": perf.mipps,
            "threads": cfg.threads,
        }, out / "perf.txt")
        if status:
            (out / "failure.txt").write_text(error + "\n", encoding="utf-8")
    return RunResult(status, sc, energy_ts, gauge_ts, summary, perf, error, snapshots)


def _summarize(cfg, sc, energy, gauges, volume0, solver) -> dict:
    ps = sc.ps
    wave = sc.wave
    s = {
        "scenario": cfg.scenario.value,
        "mode": cfg.mode.value,
        "chi": "inf" if cfg.chi is None else cfg.chi,
        "dp": sc.dp,
        "particles": len(ps),
        "t": solver.state.t if solver else 0.0,
        "steps": solver.state.step if solver else 0,
        "volume_drift": fluid_volume(ps) / volume0 - 1.0,
        "velocity_rms": velocity_rms(ps),
        "max_density_deviation": max_density_deviation(ps, sc.fluid.rho0),
    }
    if solver is not None:
        s["singular_pairs"] = solver.rates.counters.singular_pairs
        s["lj_clamps"] = solver.rates.counters.lj_clamps
    if cfg.scenario is ScenarioName.STANDING_WAVE:
        try:
            fit = fit_damping(energy, skip=wave.period, min_separation=0.25 * wave.period)
            s["beta"] = fit.beta
            s["damping_ratio"] = damping_ratio(fit, sc.fluid.nu, wave.wavenumber)
            s["peaks"] = fit.peaks
        except FitError as exc:
            s["beta"] = f"unavailable ({exc})"
    for x, ts in zip(sc.gauges, gauges):
        finite = ts.values[np.isfinite(ts.values)]
        if len(finite) >= 8 and ts.span > 2.0 * wave.period:
            start = ts.times[0] + (wave.period if cfg.scenario is ScenarioName.STANDING_WAVE else 0.0)
            sel = ts.times >= start
            tail = TimeSeries(ts.times[sel], np.nan_to_num(ts.values[sel]))
            try:
                s[f"gauge_{x:g}_period"] = dominant_period(tail)
            except ValueError:
                pass
            s[f"gauge_{x:g}_height"] = wave_height(ts, start)
    return s


def sweep_chi(base: RunConfig, chis, include_baseline: bool = True) -> list[dict]:
    """Repeat a standing-wave run over chi values; one row per run (chi = None is mode none)."""
    rows = []
    runs = ([None] if include_baseline else []) + list(chis)
    for chi in runs:
        if chi is None:
            cfg = base.replace(mode=CorrectionMode.NONE, chi=None, out=str(Path(base.out) / "chi_none"))
        else:
            cfg = base.replace(mode=CorrectionMode.LOCALIZED, chi=float(chi),
                               out=str(Path(base.out) / f"chi_{chi:g}"))
        res = run(cfg)
        rows.append({
            "chi": "none" if chi is None else chi,
            "beta": res.summary.get("beta"),
            "damping_ratio": res.summary.get("damping_ratio"),
            "mipps": res.perf.mipps,
            "status": res.status,
        })
    table = Path(base.out) / "sweep_chi.csv"
    table.parent.mkdir(parents=True, exist_ok=True)
    with open(table, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("chi,beta,damping_ratio,mipps,status\n")
        for r in rows:
            fh.write(f"{r['chi']},{r['beta']},{r['damping_ratio']},{r['mipps']},{r['status']}\n")
    return rows
