"""File formats: CSV profiles/tables, legacy-ASCII VTK fields, flat configs.

All numeric text uses '%.17g' so emitted doubles round-trip exactly.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigurationError
from .euler import primitive_from_conserved
from .mesh import FieldBlock

FMT = "%.17g"


def _fmt(v):
    return FMT % float(v)


def write_profile_csv(path, profile: dict):
    """Columns: coord, rho, u_par, p, u, v, w."""
    cols = ("coord", "rho", "u_par", "p", "u", "v", "w")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        n = len(profile["coord"])
        for i in range(n):
            fh.write(",".join(_fmt(profile[c][i]) for c in cols) + "\n")


def read_csv_columns(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=np.float64)
    return {name: data[:, i] for i, name in enumerate(header)}


def write_table_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


VTK_ARRAYS = ("rho", "mom_x", "mom_y", "mom_z", "energy")


def write_field(U: FieldBlock, path, fmt: str = "vtk-legacy-ascii", gas=None):
    """Dump the interior state to disk.

    vtk-legacy-ascii: STRUCTURED_POINTS with the five conserved components
    as CELL_DATA arrays. csv-slice: the k-middle plane as rows of
    (x, y, rho, u, v, w, p); needs `gas` for the primitive conversion.
    """
    spec = U.spec
    q = U.interior()
    if fmt == "vtk-legacy-ascii":
        nx, ny, nz = spec.n3
        with open(path, "w") as fh:
            fh.write("# vtk DataFile Version 3.0\n")
            fh.write("eulerfd field\n")
            fh.write("ASCII\n")
            fh.write("DATASET STRUCTURED_POINTS\n")
            fh.write(f"DIMENSIONS {nx + 1} {ny + 1} {nz + 1}\n")
            fh.write("ORIGIN " + " ".join(_fmt(v) for v in spec.lo3) + "\n")
            fh.write("SPACING " + " ".join(_fmt(v) for v in spec.dx3) + "\n")
            fh.write(f"CELL_DATA {nx * ny * nz}\n")
            for c, name in enumerate(VTK_ARRAYS):
                fh.write(f"SCALARS {name} double 1\n")
                fh.write("LOOKUP_TABLE default\n")
                vals = q[..., c].transpose(2, 1, 0).ravel()  # vtk x-fastest
                fh.write("\n".join(_fmt(v) for v in vals) + "\n")
    elif fmt == "csv-slice":
        if gas is None:
            raise ConfigurationError("csv-slice needs the gas model")
        k = spec.n3[2] // 2
        W = primitive_from_conserved(q[:, :, k, :], gas)
        x = spec.centers(0, guards=False)
        y = spec.centers(1, guards=False)
        with open(path, "w") as fh:
            fh.write("x,y,rho,u,v,w,p\n")
            for i in range(spec.n3[0]):
                for j in range(spec.n3[1]):
                    fh.write(",".join(_fmt(v) for v in (
                        x[i], y[j], W[i, j, 0], W[i, j, 1], W[i, j, 2],
                        W[i, j, 3], W[i, j, 4])) + "\n")
    else:
        raise ConfigurationError(f"unknown field format {fmt!r}")


def read_vtk_field(path):
    """Parse back a vtk-legacy-ascii file written by write_field."""
    arrays = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    dims = None
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith("DIMENSIONS"):
            dims = tuple(int(v) - 1 for v in line.split()[1:4])
        if line.startswith("SCALARS"):
            name = line.split()[1]
            i += 2  # skip LOOKUP_TABLE
            n = dims[0] * dims[1] * dims[2]
            vals = []
            while len(vals) < n:
                vals.extend(float(v) for v in lines[i].split())
                i += 1
            arrays[name] = np.array(vals).reshape(
                dims[2], dims[1], dims[0]).transpose(2, 1, 0)
            continue
        i += 1
    return dims, arrays


def parse_config(path) -> dict:
    """Flat key = value pairs; [section] headers group but do not namespace."""
    out = {}
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]")):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{ln}: expected key = value")
            key, val = (part.strip() for part in line.split("=", 1))
            if key in out:
                raise ConfigurationError(f"{path}:{ln}: duplicate key {key!r}")
            out[key] = val
    return out


def write_summary(path, sections: dict):
    """Structured text: [section] headers with key = value lines."""
    with open(path, "w") as fh:
        for sec, kv in sections.items():
            fh.write(f"[{sec}]\n")
            for key, val in kv.items():
                if isinstance(val, float):
                    val = _fmt(val)
                fh.write(f"{key} = {val}\n")
            fh.write("\n")


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
