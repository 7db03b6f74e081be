"""Compressible Euler state algebra: conversions, fluxes, wave speeds, eigensystem.

Conserved 5-vectors are ordered (rho, mom_x, mom_y, mom_z, energy) and primitive
5-vectors (rho, u, v, w, p). All routines are vectorized over any leading array
shape; the component axis is last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError

RHO, MX, MY, MZ, EN = range(5)

AXIS_NAMES = {"x": 0, "y": 1, "z": 2, 0: 0, 1: 1, 2: 2}


def axis_index(axis) -> int:
    try:
        return AXIS_NAMES[axis]
    except KeyError:
        raise ValueError(f"unknown axis {axis!r}; expected x/y/z or 0/1/2") from None


@dataclass(frozen=True)
class GasModel:
    """Ideal-gas closure. gamma must exceed 1."""

    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")


@dataclass(frozen=True)
class EigenSystem:
    """Left/right conserved-variable eigenvectors and wave speeds for one axis.

    left and right have shape (..., 5, 5) with left @ right = I; rows of left
    and columns of right correspond to speeds sorted ascending:
    (u_n - c, u_n, u_n, u_n, u_n + c).
    """

    left: np.ndarray
    right: np.ndarray
    speeds: np.ndarray


def _first_bad(mask):
    idx = np.nonzero(np.ravel(mask))[0]
    return int(idx[0]) if idx.size else None


def primitive_from_conserved(U, gas: GasModel):
    """Convert conserved states to primitive (rho, u, v, w, p).

    Raises InvalidStateError if any cell has non-positive density or pressure.
    """
    U = np.asarray(U, dtype=np.float64)
    rho = U[..., RHO]
    bad = ~(rho > 0.0)
    if np.any(bad):
        i = _first_bad(bad)
        raise InvalidStateError("non-positive density", index=i,
                                value=float(np.ravel(rho)[i]))
    W = np.empty_like(U)
    W[..., RHO] = rho
    W[..., 1:4] = U[..., 1:4] / rho[..., None]
    ke = 0.5 * (U[..., MX] ** 2 + U[..., MY] ** 2 + U[..., MZ] ** 2) / rho
    p = (gas.gamma - 1.0) * (U[..., EN] - ke)
    bad = ~(p > 0.0)
    if np.any(bad):
        i = _first_bad(bad)
        raise InvalidStateError("non-positive pressure", index=i,
                                value=float(np.ravel(p)[i]))
    W[..., 4] = p
    return W


def conserved_from_primitive(W, gas: GasModel):
    """Convert primitive states to conserved; E = p/(gamma-1) + rho*|v|^2/2."""
    W = np.asarray(W, dtype=np.float64)
    rho = W[..., RHO]
    p = W[..., 4]
    if np.any(~(rho > 0.0)):
        i = _first_bad(~(rho > 0.0))
        raise InvalidStateError("non-positive density", index=i,
                                value=float(np.ravel(rho)[i]))
    if np.any(~(p > 0.0)):
        i = _first_bad(~(p > 0.0))
        raise InvalidStateError("non-positive pressure", index=i,
                                value=float(np.ravel(p)[i]))
    U = np.empty_like(W)
    U[..., RHO] = rho
    U[..., 1:4] = W[..., 1:4] * rho[..., None]
    v2 = W[..., 1] ** 2 + W[..., 2] ** 2 + W[..., 3] ** 2
    U[..., EN] = p / (gas.gamma - 1.0) + 0.5 * rho * v2
    return U


def raw_flux(U, axis, gamma: float):
    """Directional analytic flux without positivity checks.

    The flux is an algebraic function of U (valid for any rho != 0), which is
    what the perturbed evaluations inside difference-based contractions need.
    """
    U = np.asarray(U, dtype=np.float64)
    n = axis_index(axis)
    rho = U[..., RHO]
    mn = U[..., 1 + n]
    un = mn / rho
    ke = 0.5 * (U[..., MX] ** 2 + U[..., MY] ** 2 + U[..., MZ] ** 2) / rho
    p = (gamma - 1.0) * (U[..., EN] - ke)
    F = np.empty_like(U)
    F[..., RHO] = mn
    F[..., MX] = U[..., MX] * un
    F[..., MY] = U[..., MY] * un
    F[..., MZ] = U[..., MZ] * un
    F[..., 1 + n] += p
    F[..., EN] = un * (U[..., EN] + p)
    return F


def analytic_flux(U, axis, gas: GasModel):
    """Directional flux F, G, or H of a valid conserved state."""
    primitive_from_conserved(U, gas)  # validity check only
    return raw_flux(U, axis, gas.gamma)


def sound_speed(W, gas: GasModel):
    return np.sqrt(gas.gamma * W[..., 4] / W[..., RHO])


def max_wave_speed(U, axis, gas: GasModel):
    """|u_axis| + c, the fastest signal speed along one axis."""
    W = primitive_from_conserved(U, gas)
    n = axis_index(axis)
    return np.abs(W[..., 1 + n]) + sound_speed(W, gas)


def eigensystem(W_face, axis, gas: GasModel) -> EigenSystem:
    """Eigendecomposition of the directional flux Jacobian at a primitive state.

    Uses the standard conserved-variable eigenvector set with the normalization
    left @ right = I. Speeds come back sorted ascending.
    """
    W = np.asarray(W_face, dtype=np.float64)
    if np.any(~(W[..., RHO] > 0.0)) or np.any(~(W[..., 4] > 0.0)):
        raise InvalidStateError("eigensystem needs positive density and pressure")
    n = axis_index(axis)
    t1, t2 = (n + 1) % 3, (n + 2) % 3
    gamma = gas.gamma
    vel = W[..., 1:4]
    un = vel[..., n]
    c = sound_speed(W, gas)
    ek = 0.5 * np.sum(vel * vel, axis=-1)
    H = c * c / (gamma - 1.0) + ek
    b1 = (gamma - 1.0) / (c * c)
    b2 = b1 * ek

    shape = W.shape[:-1]
    right = np.zeros(shape + (5, 5))
    left = np.zeros(shape + (5, 5))

    # right columns: (un-c, un entropy, un shear t1, un shear t2, un+c)
    right[..., RHO, 0] = 1.0
    right[..., 1:4, 0] = vel
    right[..., 1 + n, 0] -= c
    right[..., EN, 0] = H - un * c

    right[..., RHO, 1] = 1.0
    right[..., 1:4, 1] = vel
    right[..., EN, 1] = ek

    right[..., 1 + t1, 2] = 1.0
    right[..., EN, 2] = vel[..., t1]

    right[..., 1 + t2, 3] = 1.0
    right[..., EN, 3] = vel[..., t2]

    right[..., RHO, 4] = 1.0
    right[..., 1:4, 4] = vel
    right[..., 1 + n, 4] += c
    right[..., EN, 4] = H + un * c

    left[..., 0, RHO] = 0.5 * (b2 + un / c)
    left[..., 0, 1:4] = -0.5 * b1[..., None] * vel
    left[..., 0, 1 + n] -= 0.5 / c
    left[..., 0, EN] = 0.5 * b1

    left[..., 1, RHO] = 1.0 - b2
    left[..., 1, 1:4] = b1[..., None] * vel
    left[..., 1, EN] = -b1

    left[..., 2, RHO] = -vel[..., t1]
    left[..., 2, 1 + t1] = 1.0

    left[..., 3, RHO] = -vel[..., t2]
    left[..., 3, 1 + t2] = 1.0

    left[..., 4, RHO] = 0.5 * (b2 - un / c)
    left[..., 4, 1:4] = -0.5 * b1[..., None] * vel
    left[..., 4, 1 + n] += 0.5 / c
    left[..., 4, EN] = 0.5 * b1

    speeds = np.stack([un - c, un, un, un, un + c], axis=-1)
    return EigenSystem(left=left, right=right, speeds=speeds)


def analytic_jacobian_apply(U, V, axis, gas: GasModel):
    """Closed-form product of the directional flux Jacobian with a vector.

    Serves as the analytic oracle for the difference-based Jacobian action.
    """
    U, V = np.broadcast_arrays(np.asarray(U, dtype=np.float64),
                               np.asarray(V, dtype=np.float64))
    W = primitive_from_conserved(U, gas)
    n = axis_index(axis)
    gm1 = gas.gamma - 1.0
    vel = W[..., 1:4]
    un = vel[..., n]
    ek = 0.5 * np.sum(vel * vel, axis=-1)
    p = W[..., 4]
    H = (U[..., EN] + p) / U[..., RHO]

    v_rho, v_mom, v_en = V[..., RHO], V[..., 1:4], V[..., EN]
    vdot = np.sum(vel * v_mom, axis=-1)

    out = np.empty_like(V)
    out[..., RHO] = v_mom[..., n]
    # momentum rows: d(m_i m_n / rho) plus the pressure term on row n
    for i in range(3):
        out[..., 1 + i] = (-vel[..., i] * un * v_rho
                           + un * v_mom[..., i] + vel[..., i] * v_mom[..., n])
    out[..., 1 + n] += gm1 * (ek * v_rho - vdot + v_en)
    out[..., EN] = (un * (gm1 * ek - H) * v_rho
                    + H * v_mom[..., n] - gm1 * un * vdot
                    + gas.gamma * un * v_en)
    return out
