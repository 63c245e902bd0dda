"""Snapshot, slice, and convergence-table files.

Snapshots are plain text: a commented header with the run metadata followed
by comma-separated rows x,y,h,u,v,Theta,phi,theta,q,omega printed with 17
significant digits.  A raw little-endian float64 variant (same column order,
header in a sidecar .meta file) is available for large meshes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .coupling import DualState, SchemeConfig
from .errors import DimensionMismatchError
from .grid import BoundaryKind, GridSpec, ddx, ddy, ghosted

FORMAT_VERSION = 1
COLUMNS = ("x", "y", "h", "u", "v", "Theta", "phi", "theta", "q", "omega")


@dataclass
class Snapshot:
    t: float
    grid: GridSpec
    fields: dict               # name -> (nx, ny) array, per COLUMNS[2:]
    scheme: str = "apdffv"
    eps: float = 1.0
    nu: float = 1.0
    beta_bar: float = 0.0


def make_snapshot(dual: DualState, config: SchemeConfig,
                  grid: GridSpec) -> Snapshot:
    """Record the blended primitive solution plus derived h, Theta, omega."""
    v = dual.v
    phi = v.phi.interior
    theta = v.theta.interior
    h = 1.0 + (config.eps / config.nu) * phi
    theta_big = 1.0 + (2.0 * config.eps / config.nu) * theta
    omega = ddx(ghosted(v.v.interior, grid), grid.dx) \
        - ddy(ghosted(v.u.interior, grid), grid.dy)
    fields = {"h": h, "u": v.u.interior.copy(), "v": v.v.interior.copy(),
              "Theta": theta_big, "phi": phi.copy(), "theta": theta.copy(),
              "q": v.q.interior.copy(), "omega": omega}
    return Snapshot(dual.t, grid, fields, config.scheme.value, config.eps,
                    config.nu, config.beta_bar)


def _header_lines(snap: Snapshot):
    g = snap.grid
    return [
        f"# trsw snapshot v{FORMAT_VERSION}",
        f"# scheme = {snap.scheme}",
        f"# eps = {snap.eps:.17g}",
        f"# nu = {snap.nu:.17g}",
        f"# beta_bar = {snap.beta_bar:.17g}",
        f"# t = {snap.t:.17g}",
        f"# nx = {g.nx}",
        f"# ny = {g.ny}",
        f"# x_min = {g.x_min:.17g}",
        f"# x_max = {g.x_max:.17g}",
        f"# y_min = {g.y_min:.17g}",
        f"# y_max = {g.y_max:.17g}",
        f"# bc_x = {g.bc_x.value}",
        f"# bc_y = {g.bc_y.value}",
        "# columns = " + ",".join(COLUMNS),
    ]


def _row_table(snap: Snapshot):
    g = snap.grid
    if any(snap.fields[c].shape != (g.nx, g.ny) for c in COLUMNS[2:]):
        raise DimensionMismatchError("snapshot fields do not match the grid")
    x, y = np.meshgrid(g.x_centers, g.y_centers, indexing="ij")
    cols = [x.ravel(), y.ravel()]
    cols += [snap.fields[c].ravel() for c in COLUMNS[2:]]
    return np.column_stack(cols)


def write_snapshot(snap: Snapshot, path, binary=False):
    table = _row_table(snap)
    header = _header_lines(snap)
    if binary:
        meta = path + ".meta"
        with open(meta, "w") as fh:
            fh.write("\n".join(header) + "\n")
        table.astype("<f8").tofile(path)
        return
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        for row in table:
            fh.write(",".join(f"{val:.17g}" for val in row) + "\n")


def _parse_header(lines):
    meta = {}
    for line in lines:
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if "=" in body:
            key, val = body.split("=", 1)
            meta[key.strip()] = val.strip()
    return meta


def read_snapshot(path, binary=False) -> Snapshot:
    if binary:
        with open(path + ".meta") as fh:
            meta = _parse_header(fh.read().splitlines())
        raw = np.fromfile(path, dtype="<f8")
    else:
        with open(path) as fh:
            lines = fh.read().splitlines()
        meta = _parse_header(lines)
        rows = [line for line in lines if line and not line.startswith("#")]
        raw = np.array([[float(tok) for tok in line.split(",")]
                        for line in rows]).ravel()
    nx, ny = int(meta["nx"]), int(meta["ny"])
    table = raw.reshape(nx * ny, len(COLUMNS))
    grid = GridSpec.make(nx, ny, float(meta["x_min"]), float(meta["x_max"]),
                         float(meta["y_min"]), float(meta["y_max"]),
                         BoundaryKind(meta["bc_x"]), BoundaryKind(meta["bc_y"]))
    fields = {c: table[:, i].reshape(nx, ny)
              for i, c in enumerate(COLUMNS) if i >= 2}
    return Snapshot(float(meta["t"]), grid, fields, meta.get("scheme", ""),
                    float(meta["eps"]), float(meta["nu"]),
                    float(meta["beta_bar"]))


def write_slice(snap: Snapshot, path, axis: str, value: float):
    """Write the row of cells nearest to the requested x or y line."""
    g = snap.grid
    table = _row_table(snap).reshape(g.nx, g.ny, len(COLUMNS))
    if axis == "y":
        k = int(np.argmin(np.abs(g.y_centers - value)))
        rows = table[:, k, :]
    elif axis == "x":
        j = int(np.argmin(np.abs(g.x_centers - value)))
        rows = table[j, :, :]
    else:
        raise ValueError("axis must be 'x' or 'y'")
    header = _header_lines(snap)
    header.insert(1, f"# slice {axis} = {value:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{val:.17g}" for val in row) + "\n")


def write_convergence(report, path):
    """Mesh, error, EOC per field; one block per field."""
    with open(path, "w") as fh:
        fh.write(f"# trsw convergence v{FORMAT_VERSION}\n")
        fh.write(f"# eps = {report.eps:.17g}\n")
        fh.write("# columns = field,mesh,error,eoc\n")
        for name, errs in report.errors.items():
            orders = report.orders.get(name, [None] * len(errs))
            for mesh, err, order in zip(report.meshes, errs, orders):
                eoc_txt = "" if order is None else f"{order:.17g}"
                fh.write(f"{name},{mesh},{err:.17g},{eoc_txt}\n")
