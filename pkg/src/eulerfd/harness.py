"""Run orchestration: configure, execute, time, measure errors, write outputs."""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .contractions import EPS_OP_DEFAULT
from .errors import ConfigurationError
from .euler import GasModel
from . import io as fio
from .mesh import FieldBlock, fill_guards
from .problems import ProfileSpec, extract_profile, get_problem, vortex_exact
from .stepper import (PhaseTimers, StepReport, compute_dt, guard_for,
                      make_stepper, INTEGRATOR_IDS)

DEFAULT_CFL = {1: 0.4, 2: 0.4, 3: 0.3}


@dataclass
class RunConfig:
    problem: str
    resolution: tuple
    integrator: str
    cfl: float | None = None
    t_final: float | None = None
    outdir: str | None = None
    workers: int | None = None
    eps_op: float = EPS_OP_DEFAULT
    gamma: float = 1.4
    repeat: int = 1
    write_profiles: bool = True
    write_fields: bool = False
    write_summary: bool = True
    max_steps: int | None = None
    floor: tuple | None = None  # (rho_min, p_min); robustness experiments

    def __post_init__(self):
        if self.integrator not in INTEGRATOR_IDS:
            raise ConfigurationError(
                f"unknown integrator {self.integrator!r}; known {INTEGRATOR_IDS}")
        if isinstance(self.resolution, int):
            self.resolution = (self.resolution,)
        self.resolution = tuple(int(n) for n in self.resolution)
        if any(n <= 0 for n in self.resolution):
            raise ConfigurationError("resolution entries must be positive")
        if self.cfl is not None and not (0.0 < self.cfl < 1.0):
            raise ConfigurationError("cfl must be in (0, 1)")
        if self.repeat < 1:
            raise ConfigurationError("repeat must be >= 1")


@dataclass
class RunSummary:
    config: RunConfig
    steps: int = 0
    t_end: float = 0.0
    wall_compute: float = 0.0
    phase_seconds: dict = dc_field(default_factory=dict)
    flux_calls: int = 0
    guard_fills: int = 0
    op_counts: dict = dc_field(default_factory=dict)
    l1_density: float | None = None
    l1_all: tuple | None = None
    conservation_drift: float = 0.0
    wall_repeats: list = dc_field(default_factory=list)
    final_state: FieldBlock | None = None


def l1_error(state: FieldBlock, reference: FieldBlock):
    """Per-variable mean absolute difference over interior cells."""
    a = state.interior()
    b = reference.interior()
    if a.shape != b.shape:
        raise ConfigurationError(
            f"shape mismatch {a.shape} vs {b.shape} in l1_error")
    return np.mean(np.abs(a - b), axis=(0, 1, 2))


def _reference_state(problem, spec, t, gas):
    if problem.reference == "exact-advection":
        return vortex_exact(spec, t, gas)
    return None


def _evolve(config: RunConfig, problem, gas):
    """One timed pass of the step loop; returns (state, summary numbers)."""
    guard = guard_for(config.integrator)
    spec = problem.grid(config.resolution, guard)
    U = problem.initial_field(spec, gas)
    step, _, _ = make_stepper(config.integrator)
    cfl = config.cfl if config.cfl is not None else \
        (problem.default_cfl or DEFAULT_CFL[problem.ndim])
    t_final = config.t_final if config.t_final is not None else problem.t_final

    timers = PhaseTimers()
    totals0 = U.interior().sum(axis=(0, 1, 2))
    flux_calls = 0
    guard_fills = 0
    op_counts = {}
    steps = 0
    t = 0.0
    t0 = time.perf_counter()
    while t < t_final - 1e-13 * max(1.0, t_final):
        if config.max_steps is not None and steps >= config.max_steps:
            break
        timers.start("dt")
        dt, _ = compute_dt(U, cfl, gas)
        dt = min(dt, t_final - t)
        timers.stop()
        rep = StepReport()
        if config.integrator.startswith("pif"):
            U = step(U, dt, gas, bc=problem.bc, t=t, eps_op=config.eps_op,
                     report=rep, timers=timers)
        else:
            U = step(U, dt, gas, problem.bc, t, report=rep, timers=timers)
        if config.floor is not None:
            from .stepper import apply_floors
            apply_floors(U, gas, config.floor[0], config.floor[1])
        flux_calls += rep.flux_calls
        guard_fills += rep.guard_fills
        for key, val in rep.op_counts.items():
            op_counts[key] = op_counts.get(key, 0) + val
        t += dt
        steps += 1
    wall = time.perf_counter() - t0
    totals1 = U.interior().sum(axis=(0, 1, 2))
    # meaningful as a conservation check on periodic domains; open
    # boundaries legitimately exchange mass/momentum
    drift = float(np.max(np.abs(totals1 - totals0)
                         / np.maximum(np.abs(totals0), 1.0)))
    return U, dict(steps=steps, t_end=t, wall=wall, timers=timers,
                   flux_calls=flux_calls, guard_fills=guard_fills,
                   op_counts=op_counts, drift=drift)


def run(config: RunConfig) -> RunSummary:
    """Execute a configured run; write requested outputs; return the summary."""
    problem = get_problem(config.problem)
    gas = GasModel(config.gamma)
    if config.workers:
        import numba
        numba.set_num_threads(config.workers)
    from .kernels import warmup
    warmup()

    state = None
    result = None
    walls = []
    for _ in range(config.repeat):
        state, result = _evolve(config, problem, gas)
        walls.append(result["wall"])

    summary = RunSummary(config=config)
    summary.steps = result["steps"]
    summary.t_end = result["t_end"]
    summary.wall_compute = float(np.mean(walls))
    summary.wall_repeats = walls
    summary.phase_seconds = dict(result["timers"].seconds)
    summary.flux_calls = result["flux_calls"]
    summary.guard_fills = result["guard_fills"]
    summary.op_counts = result["op_counts"]
    summary.conservation_drift = result["drift"]
    summary.final_state = state

    ref = _reference_state(problem, state.spec, summary.t_end, gas)
    if ref is not None:
        err = l1_error(state, ref)
        summary.l1_all = tuple(float(v) for v in err)
        summary.l1_density = float(err[0])

    if config.outdir:
        _write_outputs(config, problem, gas, state, summary)
    return summary


def _profile_for(problem, state, gas):
    if problem.name in ("sod45", "shuosher45"):
        return extract_profile(state, ProfileSpec(kind="rotated",
                                                  fraction=0.25), gas)
    if problem.ndim == 3:
        return extract_profile(state, ProfileSpec(kind="x-axis",
                                                  origin_half=True), gas)
    return None


def _write_outputs(config, problem, gas, state, summary: RunSummary):
    out = fio.ensure_dir(config.outdir)
    tag = f"{config.problem}_{config.integrator}_" + \
        "x".join(str(n) for n in config.resolution)
    if config.write_profiles:
        profile = _profile_for(problem, state, gas)
        if profile is not None:
            fio.write_profile_csv(os.path.join(out, f"{tag}_profile.csv"),
                                  profile)
    if config.write_fields:
        fio.write_field(state, os.path.join(out, f"{tag}.vtk"),
                        "vtk-legacy-ascii")
        if problem.ndim >= 2:
            fio.write_field(state, os.path.join(out, f"{tag}_slice.csv"),
                            "csv-slice", gas=gas)
    if config.write_summary:
        fio.write_summary(os.path.join(out, f"{tag}_summary.txt"),
                          summary_sections(summary))


def summary_sections(summary: RunSummary) -> dict:
    cfg = summary.config
    sections = {
        "config": {
            "problem": cfg.problem,
            "resolution": ",".join(str(n) for n in cfg.resolution),
            "integrator": cfg.integrator,
            "cfl": cfg.cfl if cfg.cfl is not None else "default",
            "tfinal": summary.t_end,
            "eps_op": cfg.eps_op,
            "gamma": cfg.gamma,
            "repeat": cfg.repeat,
        },
        "timing": {
            "wall_compute_mean": summary.wall_compute,
            **{f"phase_{k}": v for k, v in summary.phase_seconds.items()},
            "wall_repeats": ",".join(fio.FMT % w for w in summary.wall_repeats),
        },
        "results": {
            "steps": summary.steps,
            "flux_calls": summary.flux_calls,
            "guard_fills": summary.guard_fills,
            **{f"op_{k}": v for k, v in summary.op_counts.items()},
            "conservation_drift": summary.conservation_drift,
        },
    }
    if summary.l1_density is not None:
        sections["results"]["l1_density"] = summary.l1_density
        sections["results"]["l1_all"] = ",".join(
            fio.FMT % v for v in summary.l1_all)
    return sections


MATCHING_BASELINE = {"pif3": "rk3", "pif4": "rk4", "rk3": "rk3", "rk4": "rk4"}


def convergence_study(problem: str, resolutions, integrators,
                      base: RunConfig | None = None, outdir=None):
    """Error/order/time table across resolutions and integrators.

    Each row: integrator, N, density L1, order vs the previous resolution
    (log-ratio), wall seconds, speedup vs the matching RK baseline at the
    same resolution.
    """
    if len(resolutions) < 1:
        raise ConfigurationError("need at least one resolution")
    summaries = {}
    for integ in integrators:
        for n in resolutions:
            cfg = RunConfig(
                problem=problem, resolution=n, integrator=integ,
                cfl=base.cfl if base else None,
                t_final=base.t_final if base else None,
                eps_op=base.eps_op if base else EPS_OP_DEFAULT,
                repeat=base.repeat if base else 1,
                write_profiles=False, write_summary=False)
            summaries[(integ, n)] = run(cfg)

    rows = []
    for integ in integrators:
        prev = None
        for n in resolutions:
            s = summaries[(integ, n)]
            order = ""
            if prev is not None and s.l1_density and prev[1]:
                ratio = (n if isinstance(n, int) else n[0]) / \
                    (prev[0] if isinstance(prev[0], int) else prev[0][0])
                order = math.log(prev[1] / s.l1_density) / math.log(ratio)
            base_integ = MATCHING_BASELINE[integ]
            base_summary = summaries.get((base_integ, n))
            speedup = (s.wall_compute / base_summary.wall_compute
                       if base_summary is not None else "")
            rows.append((integ, n if isinstance(n, int) else n[0],
                         s.l1_density if s.l1_density is not None else "",
                         order, s.wall_compute, speedup))
            prev = (n, s.l1_density)
    if outdir:
        fio.ensure_dir(outdir)
        fio.write_table_csv(
            os.path.join(outdir, f"convergence_{problem}.csv"),
            ("integrator", "n", "l1_density", "order", "wall_seconds",
             "time_ratio_vs_rk"),
            rows)
    return rows, summaries
