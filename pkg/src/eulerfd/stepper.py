"""Time-step control and the four integrators.

Single-step updates (orders 3 and 4) use time-averaged fluxes from the
cascade and fill guard cells once per step; SSP-RK baselines (3-stage third
order, 5-stage fourth order) apply the conventional pointwise-flux right-hand
side and fill guards once per stage. All stage combinations are written in
increment form so a uniform state is reproduced bitwise.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .contractions import EPS_OP_DEFAULT, EpsilonPolicy
from .errors import InvalidStateError
from .euler import GasModel
from .mesh import BoundarySpec, FieldBlock, fill_guards
from .reconstruct import all_alphas, interface_flux, split_fluxes
from .timeflux import TimeAveragedFlux, make_engine, time_averaged_flux

PIF_GUARD = 7   # one fill feeds flux derivatives, their stencils, and WENO
RK_GUARD = 3    # WENO stencil reach only; refilled every stage

INTEGRATOR_IDS = ("rk3", "rk4", "pif3", "pif4")


def guard_for(integrator: str) -> int:
    return PIF_GUARD if integrator.startswith("pif") else RK_GUARD


@dataclass
class StepReport:
    """Bookkeeping for one step: step size, speeds, work counters."""

    dt: float = 0.0
    alphas: tuple = ()
    flux_calls: int = 0
    guard_fills: int = 0
    op_counts: dict = dc_field(default_factory=dict)


class PhaseTimers:
    """Accumulates wall time per step phase (compute only, no I/O)."""

    PHASES = ("guard_fill", "bundle", "reconstruct", "update", "dt")

    def __init__(self):
        self.seconds = {p: 0.0 for p in self.PHASES}
        self._t0 = None
        self._phase = None

    def start(self, phase):
        self._t0 = time.perf_counter()
        self._phase = phase

    def stop(self):
        self.seconds[self._phase] += time.perf_counter() - self._t0
        self._phase = None

    def total(self):
        return sum(self.seconds.values())


def compute_dt(U: FieldBlock, cfl: float, gas: GasModel, alphas=None):
    """dt = cfl / sum_d(alpha_d / dx_d) over active axes."""
    if alphas is None:
        alphas = all_alphas(U, gas)
    spec = U.spec
    denom = sum(alphas[d] / spec.dx3[d] for d in spec.active_axes)
    return cfl / denom, alphas


def apply_floors(U: FieldBlock, gas: GasModel, rho_min: float, p_min: float):
    """Clamp density and pressure from below (robustness experiments only).

    Momentum is preserved; energy is raised just enough to reach p_min where
    the pressure floor engages. Off by default everywhere.
    """
    q = U.interior()
    np.maximum(q[..., 0], rho_min, out=q[..., 0])
    ke = 0.5 * (q[..., 1] ** 2 + q[..., 2] ** 2 + q[..., 3] ** 2) / q[..., 0]
    e_min = p_min / (gas.gamma - 1.0) + ke
    np.maximum(q[..., 4], e_min, out=q[..., 4])
    return U


def validate_state(U: FieldBlock, gas: GasModel, t: float | None = None):
    """Raise with the offending cell index if density or pressure is invalid."""
    q = U.interior()
    rho = q[..., 0]
    ke = 0.5 * (q[..., 1] ** 2 + q[..., 2] ** 2 + q[..., 3] ** 2)
    ok_rho = rho > 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        p = (gas.gamma - 1.0) * (q[..., 4] - np.where(ok_rho, ke / np.where(
            ok_rho, rho, 1.0), 0.0))
    bad = ~(ok_rho & (p > 0.0) & np.isfinite(q).all(axis=-1))
    if np.any(bad):
        idx = tuple(int(v) for v in np.argwhere(bad)[0])
        raise InvalidStateError("invalid state after update", index=idx,
                                value=tuple(q[idx]), time=t)


def _flux_difference_update(U: FieldBlock, faces: dict, dt: float,
                            out: FieldBlock):
    """out_interior = U_interior - sum_d (dt/dx_d)(fhat_d+ - fhat_d-)."""
    spec = U.spec
    acc = U.interior().copy()
    for d in spec.active_axes:
        fh = faces[d]
        hi = [slice(None)] * 3
        lo = [slice(None)] * 3
        hi[d] = slice(1, None)
        lo[d] = slice(None, -1)
        acc -= (dt / spec.dx3[d]) * (fh[tuple(hi)] - fh[tuple(lo)])
    out.data[spec.interior()] = acc
    out.depth = (0, 0, 0)
    return out


def _faces_from_favg(favg: TimeAveragedFlux, U: FieldBlock, gas: GasModel,
                     alphas, compiled: bool):
    faces = {}
    for d in U.spec.active_axes:
        split = split_fluxes(favg.favg[d], U, d, gas, alpha=alphas[d])
        faces[d] = interface_flux(split, U, d, gas, compiled=compiled)
    return faces


def rhs_pointwise(U: FieldBlock, gas: GasModel, alphas=None,
                  compiled: bool = True) -> np.ndarray:
    """Conventional semi-discrete right-hand side -(flux differences)/dx.

    Guards must already be filled; uses order-1 (pointwise) fluxes through
    the same splitting and reconstruction as the single-step path.
    """
    if alphas is None:
        alphas = all_alphas(U, gas)
    favg = time_averaged_flux(U, 1.0, 1, gas)
    faces = _faces_from_favg(favg, U, gas, alphas, compiled)
    spec = U.spec
    out = np.zeros(U.interior().shape)
    for d in spec.active_axes:
        fh = faces[d]
        hi = [slice(None)] * 3
        lo = [slice(None)] * 3
        hi[d] = slice(1, None)
        lo[d] = slice(None, -1)
        out -= (fh[tuple(hi)] - fh[tuple(lo)]) / spec.dx3[d]
    return out


def step_pif(U: FieldBlock, dt: float, order: int, gas: GasModel,
             bc: BoundarySpec, t: float = 0.0,
             eps_op: float = EPS_OP_DEFAULT, engine_kind: str = "fused",
             report: StepReport | None = None,
             timers: PhaseTimers | None = None) -> FieldBlock:
    """Single-step update from time-averaged fluxes; one guard fill total."""
    tm = timers or PhaseTimers()
    tm.start("guard_fill")
    fill_guards(U, bc, t)
    tm.stop()

    tm.start("dt")
    alphas = all_alphas(U, gas)
    tm.stop()

    tm.start("bundle")
    engine = make_engine(engine_kind, gas, EpsilonPolicy(eps_op=eps_op, dt_cap=dt))
    favg = time_averaged_flux(U, dt, order, gas, engine=engine)
    tm.stop()

    tm.start("reconstruct")
    faces = _faces_from_favg(favg, U, gas, alphas,
                             compiled=(engine_kind != "generic"))
    tm.stop()

    tm.start("update")
    out = FieldBlock(U.spec, np.full_like(U.data, np.nan), (0, 0, 0))
    _flux_difference_update(U, faces, dt, out)
    validate_state(out, gas, t + dt)
    tm.stop()

    if report is not None:
        report.dt = dt
        report.alphas = alphas
        report.guard_fills = 1
        report.flux_calls = engine.flux_calls
        report.op_counts = dict(engine.op_counts)
    return out


def _rk_stage_rhs(U: FieldBlock, gas, bc, t_stage, compiled, tm, counters):
    tm.start("guard_fill")
    fill_guards(U, bc, t_stage)
    tm.stop()
    counters["guard_fills"] += 1
    tm.start("dt")
    alphas = all_alphas(U, gas)
    tm.stop()
    tm.start("reconstruct")
    favg = time_averaged_flux(U, 1.0, 1, gas)
    faces = _faces_from_favg(favg, U, gas, alphas, compiled)
    tm.stop()
    tm.start("update")
    spec = U.spec
    out = np.zeros(U.interior().shape)
    for d in spec.active_axes:
        fh = faces[d]
        hi = [slice(None)] * 3
        lo = [slice(None)] * 3
        hi[d] = slice(1, None)
        lo[d] = slice(None, -1)
        out -= (fh[tuple(hi)] - fh[tuple(lo)]) / spec.dx3[d]
    tm.stop()
    return out


def _fresh(U: FieldBlock, interior_values) -> FieldBlock:
    out = FieldBlock(U.spec, np.full_like(U.data, np.nan), (0, 0, 0))
    out.data[U.spec.interior()] = interior_values
    return out


def step_ssprk3(U: FieldBlock, dt: float, gas: GasModel, bc: BoundarySpec,
                t: float = 0.0, compiled: bool = True,
                report: StepReport | None = None,
                timers: PhaseTimers | None = None, rhs=None) -> FieldBlock:
    """Three-stage third-order SSP update (Shu-Osher form); 3 guard fills.

    `rhs` overrides the stage right-hand side (signature rhs(field, t_stage)
    -> interior dU/dt); the default is the standard reconstruction RHS.
    """
    tm = timers or PhaseTimers()
    counters = {"guard_fills": 0}
    if rhs is None:
        def rhs(f, ts):
            return _rk_stage_rhs(f, gas, bc, ts, compiled, tm, counters)
    u0 = U.interior().copy()

    L0 = rhs(U, t)
    tm.start("update")
    u1 = _fresh(U, u0 + dt * L0)
    tm.stop()
    L1 = rhs(u1, t + dt)
    tm.start("update")
    u2 = _fresh(U, u0 + 0.25 * ((u1.interior() - u0) + dt * L1))
    tm.stop()
    L2 = rhs(u2, t + 0.5 * dt)
    tm.start("update")
    out = _fresh(U, u0 + (2.0 / 3.0) * ((u2.interior() - u0) + dt * L2))
    validate_state(out, gas, t + dt)
    tm.stop()
    if report is not None:
        report.dt = dt
        report.guard_fills = counters["guard_fills"]
        report.flux_calls = 0
        report.op_counts = {}
    return out


# five-stage fourth-order SSP tableau (Shu-Osher form), written as increments
# from reference states so uniform flow is preserved bitwise
_RK54 = {
    "b10": 0.391752226571890,
    "a20": 0.444370493651235, "a21": 0.555629506348765, "b21": 0.368410593050371,
    "a30": 0.620101851488403, "a32": 0.379898148511597, "b32": 0.251891774271694,
    "a40": 0.178079954393132, "a43": 0.821920045606868, "b43": 0.544974750228521,
    "a52": 0.517231671970585, "a53": 0.096059710526147, "b53": 0.063692468666290,
    "a54": 0.386708617503269, "b54": 0.226007483236906,
    "c1": 0.391752226571890, "c2": 0.586079689311540,
    "c3": 0.474542363026870, "c4": 0.935010630967650,
}


def step_ssprk54(U: FieldBlock, dt: float, gas: GasModel, bc: BoundarySpec,
                 t: float = 0.0, compiled: bool = True,
                 report: StepReport | None = None,
                 timers: PhaseTimers | None = None, rhs=None) -> FieldBlock:
    """Five-stage fourth-order SSP update; 5 guard fills."""
    tm = timers or PhaseTimers()
    counters = {"guard_fills": 0}
    if rhs is None:
        def rhs(f, ts):
            return _rk_stage_rhs(f, gas, bc, ts, compiled, tm, counters)
    k = _RK54
    u0 = U.interior().copy()

    L0 = rhs(U, t)
    tm.start("update")
    u1 = _fresh(U, u0 + (k["b10"] * dt) * L0)
    tm.stop()
    L1 = rhs(u1, t + k["c1"] * dt)
    tm.start("update")
    u2 = _fresh(U, u0 + k["a21"] * (u1.interior() - u0) + (k["b21"] * dt) * L1)
    tm.stop()
    L2 = rhs(u2, t + k["c2"] * dt)
    tm.start("update")
    u3 = _fresh(U, u0 + k["a32"] * (u2.interior() - u0) + (k["b32"] * dt) * L2)
    tm.stop()
    L3 = rhs(u3, t + k["c3"] * dt)
    tm.start("update")
    u4 = _fresh(U, u0 + k["a43"] * (u3.interior() - u0) + (k["b43"] * dt) * L3)
    tm.stop()
    L4 = rhs(u4, t + k["c4"] * dt)
    tm.start("update")
    u2i, u3i, u4i = u2.interior(), u3.interior(), u4.interior()
    out_vals = (u2i + k["a53"] * (u3i - u2i) + k["a54"] * (u4i - u2i)
                + (k["b53"] * dt) * L3 + (k["b54"] * dt) * L4)
    out = _fresh(U, out_vals)
    validate_state(out, gas, t + dt)
    tm.stop()
    if report is not None:
        report.dt = dt
        report.guard_fills = counters["guard_fills"]
        report.flux_calls = 0
        report.op_counts = {}
    return out


def make_stepper(integrator: str, order=None):
    """Map an integrator id to (step function, guard depth, fills per step)."""
    if integrator == "rk3":
        return step_ssprk3, RK_GUARD, 3
    if integrator == "rk4":
        return step_ssprk54, RK_GUARD, 5
    if integrator == "pif3":
        return lambda U, dt, gas, bc, t=0.0, **kw: step_pif(
            U, dt, 3, gas, bc, t, **kw), PIF_GUARD, 1
    if integrator == "pif4":
        return lambda U, dt, gas, bc, t=0.0, **kw: step_pif(
            U, dt, 4, gas, bc, t, **kw), PIF_GUARD, 1
    raise ValueError(f"unknown integrator {integrator!r}; "
                     f"expected one of {INTEGRATOR_IDS}")
