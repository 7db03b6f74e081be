"""Structured Cartesian grid with guard cells and 5-point central differences.

Storage is always 3D internally: arrays have shape (nx_t, ny_t, nz_t, nc) where
n?_t = n + 2*guard on active axes and exactly 1 on degenerate axes. Each
FieldBlock tracks a per-axis valid depth: how many guard layers beyond the
interior currently hold meaningful data. Stencils shrink that depth by 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigurationError, StencilBoundsError
from .euler import MX, axis_index


@dataclass(frozen=True)
class GridSpec:
    """Grid geometry: physical bounds, interior cell counts, guard depth."""

    ndim: int
    lo: tuple
    hi: tuple
    n: tuple
    guard: int

    def __post_init__(self):
        if self.ndim not in (1, 2, 3):
            raise ConfigurationError(f"ndim must be 1, 2, or 3, got {self.ndim}")
        if not (len(self.lo) == len(self.hi) == len(self.n) == self.ndim):
            raise ConfigurationError("lo, hi, n must each have ndim entries")
        if self.guard < 0:
            raise ConfigurationError("guard depth must be non-negative")
        for d in range(self.ndim):
            if self.n[d] < 1:
                raise ConfigurationError(f"n[{d}] must be >= 1")
            if not self.hi[d] > self.lo[d]:
                raise ConfigurationError(f"hi[{d}] must exceed lo[{d}]")

    # 3-axis normalized views (degenerate axes get n=1, guard=0, unit box)
    @property
    def n3(self):
        return tuple(self.n[d] if d < self.ndim else 1 for d in range(3))

    @property
    def lo3(self):
        return tuple(self.lo[d] if d < self.ndim else 0.0 for d in range(3))

    @property
    def hi3(self):
        return tuple(self.hi[d] if d < self.ndim else 1.0 for d in range(3))

    @property
    def guards(self):
        return tuple(self.guard if d < self.ndim else 0 for d in range(3))

    @property
    def dx3(self):
        return tuple((self.hi3[d] - self.lo3[d]) / self.n3[d] for d in range(3))

    @property
    def total_shape(self):
        return tuple(self.n3[d] + 2 * self.guards[d] for d in range(3))

    @property
    def active_axes(self):
        return tuple(range(self.ndim))

    def centers(self, axis, guards: bool = True) -> np.ndarray:
        """Cell-center coordinates along one axis, guard cells included by default."""
        d = axis_index(axis)
        g = self.guards[d] if guards else 0
        i = np.arange(-g, self.n3[d] + g)
        return self.lo3[d] + (i + 0.5) * self.dx3[d]

    def center_mesh(self, guards: bool = True):
        """Broadcastable (X, Y, Z) coordinate arrays over the storage region."""
        xs = [self.centers(d, guards=guards) for d in range(3)]
        return np.meshgrid(*xs, indexing="ij", sparse=True)

    def interior(self):
        return tuple(slice(g, g + n) for g, n in zip(self.guards, self.n3))

    def slab(self, depth):
        """Slices covering interior extended by `depth` guard layers per axis."""
        out = []
        for d in range(3):
            g, n = self.guards[d], self.n3[d]
            k = depth[d] if n > 1 else 0
            if g - k < 0 or n + 2 * k <= 0:
                raise StencilBoundsError(
                    f"requested depth {depth[d]} exceeds guard {g} on axis {d}")
            out.append(slice(g - k, g + n + k))
        return tuple(out)


@dataclass
class FieldBlock:
    """Per-cell vectors on a grid plus the per-axis valid guard depth."""

    spec: GridSpec
    data: np.ndarray
    depth: tuple = (0, 0, 0)

    def __post_init__(self):
        expect = self.spec.total_shape
        if self.data.shape[:3] != expect:
            raise ConfigurationError(
                f"data shape {self.data.shape[:3]} does not match grid {expect}")

    @property
    def ncomp(self):
        return self.data.shape[3]

    def interior(self) -> np.ndarray:
        return self.data[self.spec.interior()]

    def valid(self, depth=None) -> np.ndarray:
        """View of the region valid to `depth` (defaults to own depth)."""
        return self.data[self.spec.slab(self.depth if depth is None else depth)]

    def require(self, depth):
        for d in self.spec.active_axes:
            if self.depth[d] < depth[d]:
                raise StencilBoundsError(
                    f"field valid to depth {self.depth}, need {depth}")

    def copy(self) -> "FieldBlock":
        return FieldBlock(self.spec, self.data.copy(), tuple(self.depth))


def create_grid(spec: GridSpec, ncomp: int = 5, fill=np.nan) -> FieldBlock:
    """Allocate a field over interior + guards.

    Storage starts as NaN so reads of never-filled guard cells surface as NaN
    in downstream checks rather than silently contributing zeros.
    """
    data = np.full(spec.total_shape + (ncomp,), fill, dtype=np.float64)
    return FieldBlock(spec, data, (0, 0, 0))


# ---------------------------------------------------------------------------
# boundary conditions
# ---------------------------------------------------------------------------

class Periodic:
    pass


class Outflow:
    pass


class Reflect:
    pass


class DirichletProfile:
    """Time-dependent boundary profile: fn(X, Y, Z, t) -> conserved (...,5)."""

    def __init__(self, fn):
        self.fn = fn


class SplitFace:
    """Two conditions on one face, split at a coordinate along another axis.

    Used for walls that change character partway along a boundary, e.g. an
    inflow strip ahead of a reflecting wedge.
    """

    def __init__(self, split_axis, split_coord, below, above):
        self.split_axis = axis_index(split_axis)
        self.split_coord = float(split_coord)
        self.below = below
        self.above = above


@dataclass(frozen=True)
class BoundarySpec:
    """Per-face conditions: faces[axis] = (low_side, high_side)."""

    faces: tuple

    def __post_init__(self):
        for lo_c, hi_c in self.faces:
            if isinstance(lo_c, Periodic) != isinstance(hi_c, Periodic):
                raise ConfigurationError("periodic faces must come in matched pairs")

    @classmethod
    def uniform(cls, kind: str, ndim: int) -> "BoundarySpec":
        mk = {"periodic": Periodic, "outflow": Outflow, "reflect": Reflect}[kind]
        return cls(tuple((mk(), mk()) for _ in range(ndim)))


def _fill_face(field: FieldBlock, d: int, side: int, cond, t: float):
    spec = field.spec
    g, n = spec.guards[d], spec.n3[d]
    a = field.data
    guard_idx = [slice(None)] * 4
    guard_idx[d] = slice(0, g) if side == 0 else slice(g + n, g + n + g)

    if isinstance(cond, Periodic):
        src = [slice(None)] * 4
        src[d] = slice(n, n + g) if side == 0 else slice(g, g + g)
        a[tuple(guard_idx)] = a[tuple(src)]
    elif isinstance(cond, Outflow):
        src = [slice(None)] * 4
        src[d] = slice(g, g + 1) if side == 0 else slice(g + n - 1, g + n)
        a[tuple(guard_idx)] = a[tuple(src)]
    elif isinstance(cond, Reflect):
        src = [slice(None)] * 4
        src[d] = slice(g, g + g) if side == 0 else slice(n, g + n)
        mirrored = a[tuple(src)][::-1 if d == 0 else 1, ::-1 if d == 1 else 1,
                                 ::-1 if d == 2 else 1, :].copy()
        if mirrored.shape[3] == 5:
            mirrored[..., MX + d] = -mirrored[..., MX + d]
        a[tuple(guard_idx)] = mirrored
    elif isinstance(cond, DirichletProfile):
        X, Y, Z = spec.center_mesh(guards=True)
        reg = guard_idx[:3]
        vals = cond.fn(X[reg[0], :, :], Y[:, reg[1], :], Z[:, :, reg[2]], t)
        a[tuple(guard_idx)] = np.broadcast_to(vals, a[tuple(guard_idx)].shape)
    elif isinstance(cond, SplitFace):
        _fill_face(field, d, side, cond.below, t)
        # overwrite the part at/beyond the split coordinate
        sa = cond.split_axis
        coords = spec.centers(sa, guards=True)
        mask_hi = coords >= cond.split_coord
        saved = a[tuple(guard_idx)].copy()
        _fill_face(field, d, side, cond.above, t)
        sel = [slice(None)] * 4
        sel[sa] = ~mask_hi
        reg = a[tuple(guard_idx)]
        reg[tuple(sel)] = saved[tuple(sel)]
    else:
        raise ConfigurationError(f"unknown boundary condition {cond!r}")


def fill_guards(field: FieldBlock, bc: BoundarySpec, t: float = 0.0) -> FieldBlock:
    """Fill all guard layers in place; returns the field valid to full depth.

    Axis passes run x, y, z so corner regions pick up values consistent with
    both conditions by the time the later axis runs.
    """
    spec = field.spec
    if len(bc.faces) < spec.ndim:
        raise ConfigurationError("boundary spec does not cover all active axes")
    for d in spec.active_axes:
        lo_c, hi_c = bc.faces[d]
        _fill_face(field, d, 0, lo_c, t)
        _fill_face(field, d, 1, hi_c, t)
    field.depth = tuple(spec.guards[d] if d < spec.ndim else 0 for d in range(3))
    return field


# ---------------------------------------------------------------------------
# stencils
# ---------------------------------------------------------------------------

def _shifted(field: FieldBlock, out_depth, axis: int, k: int):
    """View of field.data over the out_depth slab shifted by k along axis."""
    sl = list(field.spec.slab(out_depth))
    s = sl[axis]
    sl[axis] = slice(s.start + k, s.stop + k)
    return field.data[tuple(sl)]


def central_diff(field: FieldBlock, axis, kind: str = "d1") -> FieldBlock:
    """Five-point fourth-order first or second derivative along one axis.

    d1: (f[i-2] - 8 f[i-1] + 8 f[i+1] - f[i+2]) / (12 dx)
    d2: (-f[i-2] + 16 f[i-1] - 30 f[i] + 16 f[i+1] - f[i+2]) / (12 dx^2)

    Terms are grouped into symmetric pairs so constant fields are
    annihilated exactly, not just to roundoff. The result is valid two cells
    less deep than the input along `axis`.
    """
    d = axis_index(axis)
    spec = field.spec
    if spec.n3[d] == 1:
        raise ConfigurationError(f"axis {d} is degenerate; stencils skip it")
    out_depth = list(field.depth)
    out_depth[d] -= 2
    if spec.guards[d] - out_depth[d] < 0 or spec.n3[d] + 2 * out_depth[d] <= 0:
        raise StencilBoundsError(
            f"axis {d}: input depth {field.depth[d]} leaves no valid output")
    if kind not in ("d1", "d2"):
        raise ValueError(f"kind must be d1 or d2, got {kind!r}")
    dx = spec.dx3[d]
    if field.ncomp == 5:
        from . import kernels
        out = FieldBlock(spec, np.empty_like(field.data), tuple(out_depth))
        b = []
        for s in spec.slab(out_depth):
            b.extend((s.start, s.stop))
        op = kernels.d1_field if kind == "d1" else kernels.d2_field
        scale = 1.0 / (12.0 * dx) if kind == "d1" else 1.0 / (12.0 * dx * dx)
        op(field.data, d, scale, *b, out.data)
        return out
    out = create_grid(spec, field.ncomp)
    fm2 = _shifted(field, out_depth, d, -2)
    fm1 = _shifted(field, out_depth, d, -1)
    fp1 = _shifted(field, out_depth, d, 1)
    fp2 = _shifted(field, out_depth, d, 2)
    if kind == "d1":
        acc = (8.0 * (fp1 - fm1) + (fm2 - fp2)) * (1.0 / (12.0 * dx))
    else:
        f0 = _shifted(field, out_depth, d, 0)
        acc = ((16.0 * (fm1 + fp1) - (fm2 + fp2)) - 30.0 * f0) \
            * (1.0 / (12.0 * dx * dx))
    out.data[spec.slab(out_depth)] = acc
    out.depth = tuple(out_depth)
    return out


def central_diff_mixed(field: FieldBlock, axis_a, axis_b) -> FieldBlock:
    """Mixed second derivative by composing two first-derivative passes."""
    return central_diff(central_diff(field, axis_a, "d1"), axis_b, "d1")
