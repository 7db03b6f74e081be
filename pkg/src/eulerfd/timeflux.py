"""Time-averaged fluxes via the Lax-Wendroff / Cauchy-Kowalewski cascade.

Every time derivative of the directional fluxes is rewritten in terms of
spatial derivatives through the governing system, and every Jacobian-like
tensor contraction is realized with the difference operators: F_U . v as a
directional difference, F_UU . v . w as the nested four-point stencil, and
F_UUU . v . w . x as the eight-point stencil. Terms are evaluated one by one
(never fused), reading each expansion left to right:

    F_t    = -F_U . divf
    F_tt   =  F_UU . divf . divf - F_U . divf_t
    F_ttt  = -F_UUU . divf^3 + 3 F_UU . divf . divf_t - F_U . divf_tt

with divf = F_x + G_y + H_z and the matching expansions for divf_t, the
mixed divf_t-derivatives, and divf_tt over the three directional fluxes.

Two interchangeable term engines exist: a compiled one (numba kernels) and a
generic one built on the batch operators in contractions.py; they agree to
roundoff and both count flux evaluations exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import kernels
from .contractions import (EpsilonPolicy, CountingFlux, contract2, contract3,
                           d_u)
from .euler import GasModel, raw_flux
from .mesh import FieldBlock, GridSpec, central_diff, central_diff_mixed, create_grid


def _min_depth(*fields):
    return tuple(min(f.depth[d] for f in fields) for d in range(3))


def _combine(spec: GridSpec, depth, *spans):
    """Sum scaled full-storage arrays over the slab of `depth`."""
    out = create_grid(spec, 5)
    sl = spec.slab(depth)
    acc = None
    for coef, arr in spans:
        term = coef * arr[sl]
        acc = term if acc is None else acc + term
    out.data[sl] = acc
    out.depth = tuple(depth)
    return out


class CompiledEngine:
    """Contraction terms via numba kernels specialized to the Euler fluxes."""

    name = "compiled"

    def __init__(self, gas: GasModel, policy: EpsilonPolicy):
        self.gas = gas
        self.policy = policy
        self.flux_calls = 0
        self.op_counts = {"du": 0, "c2": 0, "c3": 0}

    def _run(self, op, fields, axis, cost):
        depth = _min_depth(*fields)
        spec = fields[0].spec
        arrays = tuple(f.data for f in fields)
        out = kernels.apply_pointwise(op, arrays, axis, self.gas.gamma,
                                      self.policy.eps_op, self.policy.dt_cap,
                                      spec, depth)
        self.flux_calls += cost
        return FieldBlock(spec, out, depth)

    def du(self, U, V, axis):
        self.op_counts["du"] += 1
        return self._run(kernels.du_field, (U, V), axis, 2)

    def c2(self, U, V, W, axis):
        self.op_counts["c2"] += 1
        return self._run(kernels.c2_field, (U, V, W), axis, 4)

    def c3(self, U, V, W, X, axis):
        self.op_counts["c3"] += 1
        return self._run(kernels.c3_field, (U, V, W, X), axis, 8)


class GenericEngine:
    """Contraction terms via the batch operators and counted flux callables."""

    name = "generic"

    def __init__(self, gas: GasModel, policy: EpsilonPolicy):
        self.gas = gas
        self.policy = policy
        self.fluxes = tuple(
            CountingFlux(lambda u, a=a: raw_flux(u, a, gas.gamma), name=f"axis{a}")
            for a in range(3))
        self.op_counts = {"du": 0, "c2": 0, "c3": 0}

    @property
    def flux_calls(self):
        return sum(f.calls for f in self.fluxes)

    def _apply(self, fn, fields, axis):
        depth = _min_depth(*fields)
        spec = fields[0].spec
        sl = spec.slab(depth)
        out = create_grid(spec, 5)
        out.data[sl] = fn(self.fluxes[axis], *(f.data[sl] for f in fields),
                          self.policy)
        out.depth = depth
        return out

    def du(self, U, V, axis):
        self.op_counts["du"] += 1
        return self._apply(d_u, (U, V), axis)

    def c2(self, U, V, W, axis):
        self.op_counts["c2"] += 1
        return self._apply(contract2, (U, V, W), axis)

    def c3(self, U, V, W, X, axis):
        self.op_counts["c3"] += 1
        return self._apply(contract3, (U, V, W, X), axis)


class FusedEngine:
    """Whole-equation numba kernels; the production path.

    Identical term-by-term math and call counts as the per-term engines
    (each term still pays its own 2/4/8 flux evaluations); per-cell
    perturbation sizes are memoized per contracted vector field, and terms
    accumulate in registers instead of intermediate arrays.
    """

    name = "fused"
    fused = True

    def __init__(self, gas: GasModel, policy: EpsilonPolicy):
        self.gas = gas
        self.policy = policy
        self.flux_calls = 0
        self.op_counts = {"du": 0, "c2": 0, "c3": 0}
        self._eps = {}

    def _count(self, du=0, c2=0, c3=0):
        self.op_counts["du"] += du
        self.op_counts["c2"] += c2
        self.op_counts["c3"] += c3
        self.flux_calls += 2 * du + 4 * c2 + 8 * c3

    def eps(self, field: FieldBlock) -> np.ndarray:
        key = id(field.data)
        hit = self._eps.get(key)
        if hit is not None:
            return hit[1]
        out = np.empty(field.data.shape[:3])
        b = _bounds(field.spec, field.depth)
        kernels.eps_field(field.data, self.policy.eps_op, self.policy.dt_cap,
                          *b, out)
        self._eps[key] = (field.data, out)
        return out

    def _out(self, spec, depth):
        blk = FieldBlock(spec, np.empty(spec.total_shape + (5,)), tuple(depth))
        return blk

    def ft(self, U, bundle, axis):
        divf = bundle.divf
        depth = _min_depth(U, divf)
        out = self._out(U.spec, depth)
        kernels.k_ft(U.data, divf.data, self.eps(divf), axis, self.gas.gamma,
                     *_bounds(U.spec, depth), out.data)
        self._count(du=1)
        return out

    def ftt(self, U, bundle, axis):
        divf, divf_t = bundle.divf, bundle.divf_t
        depth = _min_depth(U, divf, divf_t)
        out = self._out(U.spec, depth)
        kernels.k_ftt(U.data, divf.data, divf_t.data, self.eps(divf),
                      self.eps(divf_t), axis, self.gas.gamma,
                      *_bounds(U.spec, depth), out.data)
        self._count(du=1, c2=1)
        return out

    def fttt(self, U, bundle, axis):
        divf, divf_t, divf_tt = bundle.divf, bundle.divf_t, bundle.divf_tt
        depth = _min_depth(U, divf, divf_t, divf_tt)
        out = self._out(U.spec, depth)
        kernels.k_fttt(U.data, divf.data, divf_t.data, divf_tt.data,
                       self.eps(divf), self.eps(divf_t), self.eps(divf_tt),
                       axis, self.gas.gamma, *_bounds(U.spec, depth), out.data)
        self._count(du=1, c2=1, c3=1)
        return out

    def _axis_triplet(self, table, axes):
        first = table[axes[0]]
        return tuple(table[d] if d in axes else first for d in range(3))

    def divt(self, U, bundle):
        axes = U.spec.active_axes
        ud = self._axis_triplet(bundle.u_d, axes)
        dfd = self._axis_triplet(bundle.divf_d, axes)
        fields = [U, bundle.divf] + [bundle.u_d[d] for d in axes] \
            + [bundle.divf_d[d] for d in axes]
        depth = _min_depth(*fields)
        out = self._out(U.spec, depth)
        kernels.k_divt(U.data, ud[0].data, ud[1].data, ud[2].data,
                       dfd[0].data, dfd[1].data, dfd[2].data,
                       bundle.divf.data,
                       self.eps(ud[0]), self.eps(ud[1]), self.eps(ud[2]),
                       self.eps(dfd[0]), self.eps(dfd[1]), self.eps(dfd[2]),
                       self.eps(bundle.divf), len(axes), self.gas.gamma,
                       *_bounds(U.spec, depth), out.data)
        self._count(du=len(axes), c2=len(axes))
        return out

    def divtd(self, U, bundle, a):
        axes = U.spec.active_axes
        ud = self._axis_triplet(bundle.u_d, axes)
        dfd = self._axis_triplet(bundle.divf_d, axes)
        udd_table = {d: bundle.u_dd[(min(a, d), max(a, d))] for d in axes}
        dfdd_table = {d: bundle.divf_dd[(min(a, d), max(a, d))] for d in axes}
        udd = self._axis_triplet(udd_table, axes)
        dfdd = self._axis_triplet(dfdd_table, axes)
        fields = [U, bundle.divf, bundle.u_d[a], bundle.divf_d[a]] \
            + [bundle.u_d[d] for d in axes] + [bundle.divf_d[d] for d in axes] \
            + list(udd_table.values()) + list(dfdd_table.values())
        depth = _min_depth(*fields)
        out = self._out(U.spec, depth)
        kernels.k_divtd(
            U.data, a, bundle.u_d[a].data,
            ud[0].data, ud[1].data, ud[2].data,
            udd[0].data, udd[1].data, udd[2].data,
            bundle.divf.data, bundle.divf_d[a].data,
            dfd[0].data, dfd[1].data, dfd[2].data,
            dfdd[0].data, dfdd[1].data, dfdd[2].data,
            self.eps(bundle.u_d[a]),
            self.eps(ud[0]), self.eps(ud[1]), self.eps(ud[2]),
            self.eps(bundle.divf), self.eps(bundle.divf_d[a]),
            self.eps(dfd[0]), self.eps(dfd[1]), self.eps(dfd[2]),
            self.policy.eps_op, self.policy.dt_cap,
            len(axes), self.gas.gamma, *_bounds(U.spec, depth), out.data)
        nd = len(axes)
        self._count(du=nd, c2=2 * nd + (nd - 1), c3=nd)
        return out

    def divtt(self, U, bundle):
        axes = U.spec.active_axes
        ud = self._axis_triplet(bundle.u_d, axes)
        dfd = self._axis_triplet(bundle.divf_d, axes)
        dftd = self._axis_triplet(bundle.divf_td, axes)
        fields = [U, bundle.divf, bundle.divf_t] \
            + [bundle.u_d[d] for d in axes] \
            + [bundle.divf_d[d] for d in axes] \
            + [bundle.divf_td[d] for d in axes]
        depth = _min_depth(*fields)
        out = self._out(U.spec, depth)
        kernels.k_divtt(
            U.data, ud[0].data, ud[1].data, ud[2].data, bundle.divf.data,
            dfd[0].data, dfd[1].data, dfd[2].data, bundle.divf_t.data,
            dftd[0].data, dftd[1].data, dftd[2].data,
            self.eps(ud[0]), self.eps(ud[1]), self.eps(ud[2]),
            self.eps(bundle.divf),
            self.eps(dfd[0]), self.eps(dfd[1]), self.eps(dfd[2]),
            self.eps(bundle.divf_t),
            self.policy.eps_op, self.policy.dt_cap,
            len(axes), self.gas.gamma, *_bounds(U.spec, depth), out.data)
        nd = len(axes)
        self._count(du=nd, c2=2 * nd, c3=nd)
        return out

    def favg_axis(self, U, bundle, axis, dt, order):
        """Accumulate the Taylor terms of one directional time-averaged flux.

        Same per-term evaluations and accumulation order as combining the
        individual derivative fields, done per cell in registers.
        """
        parts = [U, bundle.fluxes[axis]]
        divf = divf_t = divf_tt = bundle.fluxes[axis]
        if order >= 2:
            divf = bundle.divf
            parts.append(divf)
            self._count(du=1)
        if order >= 3:
            divf_t = bundle.divf_t
            parts.append(divf_t)
            self._count(du=1, c2=1)
        if order >= 4:
            divf_tt = bundle.divf_tt
            parts.append(divf_tt)
            self._count(du=1, c2=1, c3=1)
        depth = _min_depth(*parts)
        out = self._out(U.spec, depth)
        e_divf = self.eps(divf) if order >= 2 else self.eps(bundle.fluxes[axis])
        e_divft = self.eps(divf_t) if order >= 3 else e_divf
        e_divftt = self.eps(divf_tt) if order >= 4 else e_divf
        kernels.k_favg(U.data, divf.data, divf_t.data, divf_tt.data,
                       e_divf, e_divft, e_divftt, order, dt, axis,
                       self.gas.gamma, *_bounds(U.spec, depth), out.data)
        return out


def _bounds(spec, depth):
    b = []
    for s in spec.slab(depth):
        b.extend((s.start, s.stop))
    return b


def make_engine(kind: str, gas: GasModel, policy: EpsilonPolicy):
    if kind == "fused":
        return FusedEngine(gas, policy)
    if kind == "compiled":
        return CompiledEngine(gas, policy)
    if kind == "generic":
        return GenericEngine(gas, policy)
    raise ValueError(f"unknown engine kind {kind!r}")


@dataclass
class DerivativeBundle:
    """Spatial/temporal derivative fields shared across the cascade.

    Keys: u_d and divf_d by axis; u_dd and divf_dd by sorted axis pair
    (equal pair = plain second derivative); divf_td by the spatial axis of
    the mixed derivative.
    """

    fluxes: dict = dc_field(default_factory=dict)
    divf: FieldBlock | None = None
    u_d: dict = dc_field(default_factory=dict)
    u_dd: dict = dc_field(default_factory=dict)
    divf_d: dict = dc_field(default_factory=dict)
    divf_dd: dict = dc_field(default_factory=dict)
    divf_t: FieldBlock | None = None
    divf_td: dict = dc_field(default_factory=dict)
    divf_tt: FieldBlock | None = None


@dataclass
class TimeAveragedFlux:
    """Per-axis cell-centered time-averaged fluxes, valid on interior+3."""

    favg: dict
    order: int
    dt: float


def pointwise_flux_field(U: FieldBlock, axis: int, gas: GasModel) -> FieldBlock:
    """Analytic directional flux over the valid region of the field."""
    out = FieldBlock(U.spec, np.empty_like(U.data), U.depth)
    kernels.flux_field(U.data, axis, gas.gamma, *_bounds(U.spec, U.depth),
                       out.data)
    return out


def build_divergence(U: FieldBlock, gas: GasModel,
                     bundle: DerivativeBundle | None = None) -> FieldBlock:
    """divf = sum of first derivatives of the directional fluxes."""
    spec = U.spec
    terms = []
    for d in spec.active_axes:
        Fd = bundle.fluxes[d] if bundle and d in bundle.fluxes \
            else pointwise_flux_field(U, d, gas)
        if bundle is not None:
            bundle.fluxes[d] = Fd
        terms.append(central_diff(Fd, d, "d1"))
    depth = _min_depth(*terms)
    out = FieldBlock(spec, np.empty_like(U.data), depth)
    b = _bounds(spec, depth)
    if len(terms) == 1:
        sl = spec.slab(depth)
        out.data[sl] = terms[0].data[sl]
    elif len(terms) == 2:
        kernels.sum2_field(terms[0].data, terms[1].data, *b, out.data)
    else:
        kernels.sum3_field(terms[0].data, terms[1].data, terms[2].data, *b,
                           out.data)
    return out


def build_spatial_bundle(U: FieldBlock, gas: GasModel, order: int) -> DerivativeBundle:
    """All spatial-derivative fields the cascade needs for a given order.

    divf is evaluated on interior+5 (it gets differentiated again); every
    derived field on interior+3, the reach the reconstruction needs.
    """
    b = DerivativeBundle()
    spec = U.spec
    axes = spec.active_axes
    nd = len(axes)
    sc = [1.0 / (12.0 * spec.dx3[d]) for d in range(3)]

    for d in axes:
        b.fluxes[d] = pointwise_flux_field(U, d, gas)
    f = [b.fluxes.get(d, b.fluxes[axes[0]]).data for d in range(3)]
    depth5 = tuple(5 if d in axes else 0 for d in range(3))
    divf = FieldBlock(spec, np.empty_like(U.data), depth5)
    kernels.k_divf(f[0], f[1], f[2], nd, sc[0], sc[1], sc[2],
                   *_bounds(spec, depth5), divf.data)
    b.divf = divf
    if order < 3:
        return b

    depth3 = tuple(3 if d in axes else 0 for d in range(3))
    bounds3 = _bounds(spec, depth3)
    second = 1 if order >= 4 else 0

    def derivatives(parent, d1_map, dd_map):
        outs = []
        for d in range(3):
            if d in axes:
                d1_map[d] = FieldBlock(spec, np.empty_like(U.data), depth3)
                outs.append(d1_map[d].data)
            else:
                outs.append(parent.data)
        for pair in ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)):
            if second and pair[0] in axes and pair[1] in axes:
                dd_map[pair] = FieldBlock(spec, np.empty_like(U.data), depth3)
                outs.append(dd_map[pair].data)
            else:
                outs.append(parent.data)
        kernels.k_spatial(parent.data, nd, sc[0], sc[1], sc[2], second,
                          *bounds3, *outs)

    derivatives(U, b.u_d, b.u_dd)
    derivatives(b.divf, b.divf_d, b.divf_dd)
    return b


def flux_time_derivative_1(U, bundle, axis, engine) -> FieldBlock:
    """F_t = -F_U . divf for the given directional flux."""
    if getattr(engine, "fused", False):
        return engine.ft(U, bundle, axis)
    t = engine.du(U, bundle.divf, axis)
    return _combine(U.spec, t.depth, (-1.0, t.data))


def div_t(U, bundle, engine) -> FieldBlock:
    """Time derivative of the flux divergence.

    divf_t = - sum_d [ D_UU . U_d . divf + D_U . divf_d ]  over directional
    fluxes D in {F, G, H} paired with their own axis d.
    """
    if getattr(engine, "fused", False):
        return engine.divt(U, bundle)
    spans = []
    for d in U.spec.active_axes:
        t1 = engine.c2(U, bundle.u_d[d], bundle.divf, d)
        t2 = engine.du(U, bundle.divf_d[d], d)
        spans.extend([(-1.0, t1), (-1.0, t2)])
    depth = _min_depth(*(t for _, t in spans))
    return _combine(U.spec, depth, *((c, t.data) for c, t in spans))


def flux_time_derivative_2(U, bundle, axis, engine) -> FieldBlock:
    """F_tt = F_UU . divf . divf - F_U . divf_t."""
    if getattr(engine, "fused", False):
        return engine.ftt(U, bundle, axis)
    t1 = engine.c2(U, bundle.divf, bundle.divf, axis)
    t2 = engine.du(U, bundle.divf_t, axis)
    depth = _min_depth(t1, t2)
    return _combine(U.spec, depth, (1.0, t1.data), (-1.0, t2.data))


def div_td(U, bundle, a: int, engine) -> FieldBlock:
    """Mixed derivative of divf_t along spatial axis `a`.

    Differentiating each line of divf_t in space gives, per directional flux
    D with its axis d (every term negative):

        D_UUU . U_a . U_d . divf        (third contraction)
        D_UU  . U_ad . divf             (Hessian)
        D_UU  . divf_a . U_d            (Hessian; doubled when d == a)
        D_UU  . U_a . divf_d            (Hessian; merged into the above at d == a)
        D_U   . divf_ad                 (Jacobian)
    """
    if getattr(engine, "fused", False):
        return engine.divtd(U, bundle, a)
    spans = []
    for d in U.spec.active_axes:
        key = (min(a, d), max(a, d))
        t1 = engine.c3(U, bundle.u_d[a], bundle.u_d[d], bundle.divf, d)
        t2 = engine.c2(U, bundle.u_dd[key], bundle.divf, d)
        spans.extend([(-1.0, t1), (-1.0, t2)])
        if d == a:
            t3 = engine.c2(U, bundle.divf_d[a], bundle.u_d[a], d)
            spans.append((-2.0, t3))
        else:
            t3 = engine.c2(U, bundle.divf_d[a], bundle.u_d[d], d)
            t4 = engine.c2(U, bundle.u_d[a], bundle.divf_d[d], d)
            spans.extend([(-1.0, t3), (-1.0, t4)])
        t5 = engine.du(U, bundle.divf_dd[key], d)
        spans.append((-1.0, t5))
    depth = _min_depth(*(t for _, t in spans))
    return _combine(U.spec, depth, *((c, t.data) for c, t in spans))


def div_tt(U, bundle, engine) -> FieldBlock:
    """Second time derivative of the flux divergence.

    divf_tt = sum_d [ D_UUU . divf . U_d . divf + 2 D_UU . divf . divf_d
                      - D_UU . U_d . divf_t - D_U . divf_td ].
    """
    if getattr(engine, "fused", False):
        return engine.divtt(U, bundle)
    spans = []
    for d in U.spec.active_axes:
        t1 = engine.c3(U, bundle.divf, bundle.u_d[d], bundle.divf, d)
        t2 = engine.c2(U, bundle.divf, bundle.divf_d[d], d)
        t3 = engine.c2(U, bundle.u_d[d], bundle.divf_t, d)
        t4 = engine.du(U, bundle.divf_td[d], d)
        spans.extend([(1.0, t1), (2.0, t2), (-1.0, t3), (-1.0, t4)])
    depth = _min_depth(*(t for _, t in spans))
    return _combine(U.spec, depth, *((c, t.data) for c, t in spans))


def flux_time_derivative_3(U, bundle, axis, engine) -> FieldBlock:
    """F_ttt = -F_UUU . divf^3 + 3 F_UU . divf . divf_t - F_U . divf_tt."""
    if getattr(engine, "fused", False):
        return engine.fttt(U, bundle, axis)
    t1 = engine.c3(U, bundle.divf, bundle.divf, bundle.divf, axis)
    t2 = engine.c2(U, bundle.divf, bundle.divf_t, axis)
    t3 = engine.du(U, bundle.divf_tt, axis)
    depth = _min_depth(t1, t2, t3)
    return _combine(U.spec, depth,
                    (-1.0, t1.data), (3.0, t2.data), (-1.0, t3.data))


def time_averaged_flux(U: FieldBlock, dt: float, order: int, gas: GasModel,
                       engine=None, eps_op: float | None = None,
                       bundle_out: dict | None = None) -> TimeAveragedFlux:
    """Temporal Taylor approximation of the time-averaged directional fluxes.

    favg_d = sum_{i < order} dt^i / (i+1)! * (d/dt)^i F_d at the current
    state; order 1 is the plain pointwise flux. The result is valid on
    interior+3, ready for reconstruction.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"order must be 1..4, got {order}")
    spec = U.spec
    if engine is None:
        policy = EpsilonPolicy(eps_op=eps_op if eps_op is not None else
                               EpsilonPolicy.eps_op, dt_cap=dt)
        engine = FusedEngine(gas, policy)
    favg = {}
    if order == 1:
        for d in spec.active_axes:
            favg[d] = pointwise_flux_field(U, d, gas)
        return TimeAveragedFlux(favg=favg, order=1, dt=dt)

    bundle = build_spatial_bundle(U, gas, order)
    if order >= 3:
        bundle.divf_t = div_t(U, bundle, engine)
    if order >= 4:
        for a in spec.active_axes:
            bundle.divf_td[a] = div_td(U, bundle, a, engine)
        bundle.divf_tt = div_tt(U, bundle, engine)

    if getattr(engine, "fused", False):
        for d in spec.active_axes:
            favg[d] = engine.favg_axis(U, bundle, d, dt, order)
        if bundle_out is not None:
            bundle_out["bundle"] = bundle
        return TimeAveragedFlux(favg=favg, order=order, dt=dt)

    coeff = (1.0, dt / 2.0, dt * dt / 6.0, dt ** 3 / 24.0)
    for d in spec.active_axes:
        terms = [(1.0, bundle.fluxes[d].data)]
        ft = flux_time_derivative_1(U, bundle, d, engine)
        terms.append((coeff[1], ft.data))
        parts = [bundle.fluxes[d], ft]
        if order >= 3:
            ftt = flux_time_derivative_2(U, bundle, d, engine)
            terms.append((coeff[2], ftt.data))
            parts.append(ftt)
        if order >= 4:
            fttt = flux_time_derivative_3(U, bundle, d, engine)
            terms.append((coeff[3], fttt.data))
            parts.append(fttt)
        depth = _min_depth(*parts)
        favg[d] = _combine(spec, depth, *terms)
    if bundle_out is not None:
        bundle_out["bundle"] = bundle
    return TimeAveragedFlux(favg=favg, order=order, dt=dt)
