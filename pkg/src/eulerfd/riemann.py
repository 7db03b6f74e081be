"""Exact 1D Riemann solver and the spherically symmetric 1D reference run.

The exact solver follows the classical pressure-function construction
(see Toro, "Riemann Solvers and Numerical Methods for Fluid Dynamics"):
Newton iteration on the star-region pressure, then self-similar sampling
in xi = x/t across the resulting wave fan.
"""

from __future__ import annotations

import numpy as np

from .errors import VacuumError
from .euler import GasModel
from .mesh import (BoundarySpec, FieldBlock, GridSpec, Outflow, Reflect,
                   create_grid, fill_guards)


def _pressure_fn(p, rho_k, p_k, c_k, g):
    """f_K(p) and its derivative for one side of the fan."""
    if p > p_k:  # shock branch
        A = 2.0 / ((g + 1.0) * rho_k)
        B = (g - 1.0) / (g + 1.0) * p_k
        root = np.sqrt(A / (p + B))
        f = (p - p_k) * root
        df = root * (1.0 - 0.5 * (p - p_k) / (p + B))
    else:  # rarefaction branch
        f = 2.0 * c_k / (g - 1.0) * ((p / p_k) ** ((g - 1.0) / (2 * g)) - 1.0)
        df = 1.0 / (rho_k * c_k) * (p / p_k) ** (-(g + 1.0) / (2 * g))
    return f, df


def solve_star(left, right, gas: GasModel, tol: float = 1e-12):
    """Star-region pressure and velocity for primitive left/right states."""
    g = gas.gamma
    rho_l, u_l, p_l = left[0], left[1], left[4]
    rho_r, u_r, p_r = right[0], right[1], right[4]
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    if 2.0 * (c_l + c_r) / (g - 1.0) <= u_r - u_l:
        raise VacuumError("initial states generate vacuum")

    # two-rarefaction guess, positivity-clamped
    pv = 0.5 * (p_l + p_r) - 0.125 * (u_r - u_l) * (rho_l + rho_r) * (c_l + c_r)
    p = max(tol, pv)
    for _ in range(100):
        f_l, df_l = _pressure_fn(p, rho_l, p_l, c_l, g)
        f_r, df_r = _pressure_fn(p, rho_r, p_r, c_r, g)
        change = (f_l + f_r + (u_r - u_l)) / (df_l + df_r)
        p_new = p - change
        if p_new <= 0.0:
            p_new = 0.5 * p
        if abs(p_new - p) <= tol * max(1.0, p_new):
            p = p_new
            break
        p = p_new
    f_l, _ = _pressure_fn(p, rho_l, p_l, c_l, g)
    f_r, _ = _pressure_fn(p, rho_r, p_r, c_r, g)
    u = 0.5 * (u_l + u_r) + 0.5 * (f_r - f_l)
    return p, u


def exact_riemann_1d(left, right, xi, gas: GasModel):
    """Self-similar solution W(xi = x/t) of the 1D Riemann problem.

    left/right are primitive 5-vectors (transverse velocities ride along as
    passive contacts); xi may be a scalar or array. Returns primitive states.
    """
    g = gas.gamma
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    scalar = xi.ndim == 0
    xi = np.atleast_1d(xi)
    p_star, u_star = solve_star(left, right, gas)

    rho_l, u_l, p_l = left[0], left[1], left[4]
    rho_r, u_r, p_r = right[0], right[1], right[4]
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    gm, gp = g - 1.0, g + 1.0

    out = np.empty(xi.shape + (5,))
    side_left = xi <= u_star

    # left of the contact
    if p_star > p_l:  # left shock
        rho_star_l = rho_l * ((p_star / p_l + gm / gp) / (gm / gp * p_star / p_l + 1.0))
        s_l = u_l - c_l * np.sqrt(gp / (2 * g) * p_star / p_l + gm / (2 * g))
        pre = xi < s_l
        _assign(out, pre & side_left, rho_l, u_l, left[2], left[3], p_l)
        _assign(out, ~pre & side_left, rho_star_l, u_star, left[2], left[3], p_star)
    else:  # left rarefaction
        rho_star_l = rho_l * (p_star / p_l) ** (1.0 / g)
        c_star_l = c_l * (p_star / p_l) ** (gm / (2 * g))
        head, tail = u_l - c_l, u_star - c_star_l
        pre = xi < head
        post = xi > tail
        fan = side_left & ~pre & ~post
        _assign(out, pre & side_left, rho_l, u_l, left[2], left[3], p_l)
        _assign(out, post & side_left, rho_star_l, u_star, left[2], left[3], p_star)
        if np.any(fan):
            xif = xi[fan]
            u_f = 2.0 / gp * (c_l + gm / 2.0 * u_l + xif)
            c_f = 2.0 / gp * (c_l + gm / 2.0 * (u_l - xif))
            rho_f = rho_l * (c_f / c_l) ** (2.0 / gm)
            p_f = p_l * (c_f / c_l) ** (2.0 * g / gm)
            out[fan, 0] = rho_f
            out[fan, 1] = u_f
            out[fan, 2] = left[2]
            out[fan, 3] = left[3]
            out[fan, 4] = p_f

    # right of the contact
    side_right = ~side_left
    if p_star > p_r:  # right shock
        rho_star_r = rho_r * ((p_star / p_r + gm / gp) / (gm / gp * p_star / p_r + 1.0))
        s_r = u_r + c_r * np.sqrt(gp / (2 * g) * p_star / p_r + gm / (2 * g))
        post = xi > s_r
        _assign(out, post & side_right, rho_r, u_r, right[2], right[3], p_r)
        _assign(out, ~post & side_right, rho_star_r, u_star, right[2], right[3], p_star)
    else:  # right rarefaction
        rho_star_r = rho_r * (p_star / p_r) ** (1.0 / g)
        c_star_r = c_r * (p_star / p_r) ** (gm / (2 * g))
        head, tail = u_r + c_r, u_star + c_star_r
        post = xi > head
        pre = xi < tail
        fan = side_right & ~pre & ~post
        _assign(out, post & side_right, rho_r, u_r, right[2], right[3], p_r)
        _assign(out, pre & side_right, rho_star_r, u_star, right[2], right[3], p_star)
        if np.any(fan):
            xif = xi[fan]
            u_f = 2.0 / gp * (-c_r + gm / 2.0 * u_r + xif)
            c_f = 2.0 / gp * (c_r - gm / 2.0 * (u_r - xif))
            rho_f = rho_r * (c_f / c_r) ** (2.0 / gm)
            p_f = p_r * (c_f / c_r) ** (2.0 * g / gm)
            out[fan, 0] = rho_f
            out[fan, 1] = u_f
            out[fan, 2] = right[2]
            out[fan, 3] = right[3]
            out[fan, 4] = p_f

    return out[0] if scalar else out


def _assign(out, mask, rho, u, v, w, p):
    out[mask, 0] = rho
    out[mask, 1] = u
    out[mask, 2] = v
    out[mask, 3] = w
    out[mask, 4] = p


def spherical_reference_1d(resolution: int, t_final: float, gas: GasModel,
                           cfl: float = 0.4):
    """High-resolution radial reference for the spherical blast problems.

    Solves the 1D Euler equations on r in [0, 1] with the spherical
    geometric source -(2/r)(rho u, rho u^2, 0, 0, u(E+p)), reflecting at the
    origin and outflow at r = 1, advanced with the five-stage fourth-order
    SSP scheme. Returns (r_centers, primitive profile) at t_final.
    """
    from .euler import conserved_from_primitive, primitive_from_conserved
    from .reconstruct import all_alphas
    from .stepper import RK_GUARD, compute_dt, step_ssprk54, _rk_stage_rhs
    from .stepper import PhaseTimers

    spec = GridSpec(ndim=1, lo=(0.0,), hi=(1.0,), n=(resolution,), guard=RK_GUARD)
    bc = BoundarySpec(((Reflect(), Outflow()),))
    U = create_grid(spec, 5)
    r = spec.centers(0, guards=False)
    W = np.empty((resolution, 5))
    inside = r < 0.5
    W[:, 0] = np.where(inside, 1.0, 0.125)
    W[:, 1:4] = 0.0
    W[:, 4] = np.where(inside, 1.0, 0.1)
    U.data[spec.interior()] = conserved_from_primitive(W, gas)[:, None, None, :]

    rfac = (2.0 / r)[:, None, None, None]

    def rhs(field, ts):
        tm = PhaseTimers()
        base = _rk_stage_rhs(field, gas, bc, ts, True, tm, {"guard_fills": 0})
        q = field.interior()
        rho = q[..., 0]
        u = q[..., 1] / rho
        ke = 0.5 * (q[..., 1] ** 2 + q[..., 2] ** 2 + q[..., 3] ** 2) / rho
        p = (gas.gamma - 1.0) * (q[..., 4] - ke)
        src = np.zeros_like(q)
        src[..., 0] = rho * u
        src[..., 1] = rho * u * u
        src[..., 4] = u * (q[..., 4] + p)
        return base - rfac * src

    t = 0.0
    while t < t_final - 1e-14:
        dt, _ = compute_dt(U, cfl, gas)
        dt = min(dt, t_final - t)
        U = step_ssprk54(U, dt, gas, bc, t, rhs=rhs)
        t += dt
    prim = primitive_from_conserved(U.interior()[:, 0, 0, :], gas)
    return r, prim
