"""Fifth-order WENO-JS interface fluxes with global Lax-Friedrichs splitting.

Cell-centered (time-averaged) fluxes are split into upwind/downwind parts
with a single per-axis speed alpha taken over the whole domain, projected
onto the characteristic fields of the face-average state, reconstructed to
faces, and projected back. A compiled sweep kernel carries production runs;
the numpy path here is the reference the kernel is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .euler import (GasModel, axis_index, eigensystem,
                    primitive_from_conserved, sound_speed)
from .mesh import FieldBlock

# WENO-JS constants: ideal weights, smoothness regularizer, exponent 2
IDEAL_WEIGHTS = (0.1, 0.6, 0.3)
WENO_EPS = 1e-6


def weno5_point(stencil):
    """Left-biased WENO-JS value at the i+1/2 face from cells i-2 .. i+2.

    Accepts five scalars or five same-shaped arrays. The right-biased value
    at the same face is obtained by passing the cells i+3 .. i-1, reversed.
    """
    a, b, c, d, e = (np.asarray(q, dtype=np.float64) for q in stencil)
    b0 = 13.0 / 12.0 * (a - 2 * b + c) ** 2 + 0.25 * (a - 4 * b + 3 * c) ** 2
    b1 = 13.0 / 12.0 * (b - 2 * c + d) ** 2 + 0.25 * (b - d) ** 2
    b2 = 13.0 / 12.0 * (c - 2 * d + e) ** 2 + 0.25 * (3 * c - 4 * d + e) ** 2
    a0 = IDEAL_WEIGHTS[0] / ((WENO_EPS + b0) * (WENO_EPS + b0))
    a1 = IDEAL_WEIGHTS[1] / ((WENO_EPS + b1) * (WENO_EPS + b1))
    a2 = IDEAL_WEIGHTS[2] / ((WENO_EPS + b2) * (WENO_EPS + b2))
    s = a0 + a1 + a2
    p0 = (2 * a - 7 * b + 11 * c) / 6.0
    p1 = (-b + 5 * c + 2 * d) / 6.0
    p2 = (2 * c + 5 * d - e) / 6.0
    return (a0 * p0 + a1 * p1 + a2 * p2) / s


@dataclass
class SplitFluxPair:
    """Upwind/downwind split of a cell-centered flux: 0.5 (F +/- alpha U)."""

    plus: FieldBlock
    minus: FieldBlock
    alpha: float
    axis: int


def global_alpha(U: FieldBlock, axis, gas: GasModel) -> float:
    """Largest |u_axis| + c over the interior; order-independent reduction."""
    W = primitive_from_conserved(U.interior(), gas)
    speed = np.abs(W[..., 1 + axis_index(axis)]) + sound_speed(W, gas)
    return float(np.max(speed))


def all_alphas(U: FieldBlock, gas: GasModel):
    W = primitive_from_conserved(U.interior(), gas)
    c = sound_speed(W, gas)
    return tuple(float(np.max(np.abs(W[..., 1 + d]) + c))
                 for d in U.spec.active_axes)


def split_fluxes(favg: FieldBlock, U: FieldBlock, axis, gas: GasModel,
                 alpha: float | None = None) -> SplitFluxPair:
    """Global Lax-Friedrichs split of the (time-averaged) directional flux.

    Computed over the flux's valid slab only; the fringe stays untouched.
    """
    axis = axis_index(axis)
    if alpha is None:
        alpha = global_alpha(U, axis, gas)
    spec = favg.spec
    sl = spec.slab(favg.depth)
    plus = FieldBlock(spec, np.empty_like(favg.data), favg.depth)
    minus = FieldBlock(spec, np.empty_like(favg.data), favg.depth)
    au = alpha * U.data[sl]
    plus.data[sl] = 0.5 * (favg.data[sl] + au)
    minus.data[sl] = 0.5 * (favg.data[sl] - au)
    return SplitFluxPair(plus=plus, minus=minus, alpha=alpha, axis=axis)


def _sweep_views(split: SplitFluxPair, U: FieldBlock, axis: int):
    """Cut full-storage arrays to the sweep slab: depth 3 along axis, interior
    elsewhere."""
    spec = U.spec
    depth = [0, 0, 0]
    depth[axis] = 3
    split.plus.require(depth)
    split.minus.require(depth)
    U.require(depth)
    sl = spec.slab(depth)
    return split.plus.data[sl], split.minus.data[sl], U.data[sl]


def interface_flux(split: SplitFluxPair, U: FieldBlock, axis, gas: GasModel,
                   compiled: bool = True) -> np.ndarray:
    """Numerical fluxes on all interior faces along `axis`.

    Shape matches the interior except the face axis carries n+1 entries; the
    same face value serves both adjacent cells, so the update telescopes.
    """
    axis = axis_index(axis)
    fp, fm, u = _sweep_views(split, U, axis)
    if compiled:
        return kernels.weno_sweep(fp, fm, u, axis, gas.gamma)
    return _interface_flux_reference(fp, fm, u, axis, gas)


def _interface_flux_reference(fp, fm, u, axis, gas: GasModel):
    fp = np.moveaxis(fp, axis, 2)
    fm = np.moveaxis(fm, axis, 2)
    u = np.moveaxis(u, axis, 2)
    ns = fp.shape[2]
    nf = ns - 5
    WL = primitive_from_conserved(u[:, :, 2:2 + nf], gas)
    WR = primitive_from_conserved(u[:, :, 3:3 + nf], gas)
    es = eigensystem(0.5 * (WL + WR), axis, gas)
    ap = [np.einsum("...ij,...j->...i", es.left, fp[:, :, s:s + nf])
          for s in range(6)]
    am = [np.einsum("...ij,...j->...i", es.left, fm[:, :, s:s + nf])
          for s in range(6)]
    rp = weno5_point(ap[0:5])
    rm = weno5_point(am[5:0:-1])
    fhat = np.einsum("...ij,...j->...i", es.right, rp + rm)
    return np.moveaxis(fhat, 2, axis)
