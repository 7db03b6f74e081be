"""Shared test utilities: small fields, semi-discrete reference integrators.

The reference ODE here is the method-of-lines system U' = -divf(U) with the
same five-point divergence the cascade differentiates, so time-shifted
differences of it are an independent oracle for the cascade's temporal
derivative fields.
"""

import numpy as np

from eulerfd import BoundarySpec, GasModel, GridSpec, create_grid, fill_guards
from eulerfd.problems import get_problem
from eulerfd.stepper import PIF_GUARD
from eulerfd.timeflux import build_divergence

GAS = GasModel(1.4)


def vortex_field(n=64, guard=PIF_GUARD):
    """Smooth periodic 2D state with guards filled."""
    prob = get_problem("vortex")
    spec = prob.grid(n, guard)
    U = prob.initial_field(spec, GAS)
    fill_guards(U, prob.bc, 0.0)
    return U, prob.bc, spec


def uniform_field(value=(1.0, 0.3, -0.2, 0.1, 2.5), n=16, ndim=2,
                  guard=PIF_GUARD):
    spec = GridSpec(ndim=ndim, lo=(0.0,) * ndim, hi=(1.0,) * ndim,
                    n=(n,) * ndim, guard=guard)
    U = create_grid(spec, 5)
    U.data[spec.interior()] = np.asarray(value)
    bc = BoundarySpec.uniform("periodic", ndim)
    fill_guards(U, bc, 0.0)
    return U, bc, spec


def semi_discrete_rhs(U, bc, gas=GAS, t=0.0):
    """-divf of the guard-filled field; interior values."""
    fill_guards(U, bc, t)
    divf = build_divergence(U, gas)
    return -divf.interior().copy()


def advance_rk4(U, bc, dt, n_sub, gas=GAS, quadrature=False):
    """Classical RK4 on U' = -divf(U); optionally also integrates the
    running time integral of each directional flux (for time averages)."""
    from eulerfd.timeflux import pointwise_flux_field

    spec = U.spec
    work = U.copy()
    h = dt / n_sub
    axes = spec.active_axes
    phi = {d: np.zeros(work.interior().shape) for d in axes} if quadrature else None

    def flux_interior(field):
        return {d: pointwise_flux_field(field, d, gas).interior().copy()
                for d in axes}

    for _ in range(n_sub):
        u0 = work.interior().copy()
        k1 = semi_discrete_rhs(work, bc, gas)
        f1 = flux_interior(work) if quadrature else None
        s2 = work.copy()
        s2.data[spec.interior()] = u0 + 0.5 * h * k1
        k2 = semi_discrete_rhs(s2, bc, gas)
        f2 = flux_interior(s2) if quadrature else None
        s3 = work.copy()
        s3.data[spec.interior()] = u0 + 0.5 * h * k2
        k3 = semi_discrete_rhs(s3, bc, gas)
        f3 = flux_interior(s3) if quadrature else None
        s4 = work.copy()
        s4.data[spec.interior()] = u0 + h * k3
        k4 = semi_discrete_rhs(s4, bc, gas)
        f4 = flux_interior(s4) if quadrature else None
        work.data[spec.interior()] = u0 + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if quadrature:
            for d in axes:
                phi[d] += (h / 6.0) * (f1[d] + 2 * f2[d] + 2 * f3[d] + f4[d])
    fill_guards(work, bc, 0.0)
    return (work, phi) if quadrature else work


def rel_err(a, b, scale=None):
    s = np.max(np.abs(b)) if scale is None else scale
    return np.max(np.abs(a - b)) / s
