"""Uniform cell-centered grid, ghost frames, and the central-difference stencils.

All fields are stored as cell averages on an nx-by-ny interior block surrounded
by a ghost frame of width 2 (the widest stencil reaches corner neighbors, and
the reconstruction needs one ghost cell of slopes).  Axis 0 is x (index j),
axis 1 is y (index k).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import StaleGhostsError

NG = 2  # ghost frame width


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    EXTRAPOLATE = "extrapolate"  # zero-order copy of the edge cell ("free")


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    dx: float
    dy: float
    bc_x: BoundaryKind
    bc_y: BoundaryKind

    @classmethod
    def make(cls, nx, ny, x_min, x_max, y_min, y_max,
             bc_x=BoundaryKind.PERIODIC, bc_y=BoundaryKind.PERIODIC):
        if nx < 4 or ny < 4:
            raise ValueError("grid needs at least 4 cells per direction")
        if x_max <= x_min or y_max <= y_min:
            raise ValueError("degenerate domain extents")
        dx = (x_max - x_min) / nx
        dy = (y_max - y_min) / ny
        return cls(nx, ny, float(x_min), float(x_max), float(y_min),
                   float(y_max), dx, dy, bc_x, bc_y)

    @property
    def x_centers(self):
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y_centers(self):
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    @property
    def y_row(self):
        """Cell-center y values broadcastable over (nx, ny) fields."""
        return self.y_centers[None, :]

    def cell_centers(self):
        """Meshgrid of cell centers, each shaped (nx, ny)."""
        return np.meshgrid(self.x_centers, self.y_centers, indexing="ij")

    @property
    def cell_area(self):
        return self.dx * self.dy


class ScalarField:
    """Cell-average storage: interior (nx, ny) plus a width-2 ghost frame.

    ``ghosts_valid`` tracks whether the frame is consistent with the grid's
    boundary conditions; stencil operations refuse stale ghosts so that a
    missing fill fails fast instead of corrupting results silently.
    """

    __slots__ = ("data", "ghosts_valid")

    def __init__(self, data, ghosts_valid=False):
        self.data = np.asarray(data, dtype=np.float64)
        self.ghosts_valid = ghosts_valid

    @classmethod
    def from_interior(cls, values):
        values = np.asarray(values, dtype=np.float64)
        nx, ny = values.shape
        data = np.zeros((nx + 2 * NG, ny + 2 * NG))
        data[NG:-NG, NG:-NG] = values
        return cls(data, ghosts_valid=False)

    @property
    def interior(self):
        return self.data[NG:-NG, NG:-NG]

    @property
    def shape(self):
        inter = self.interior
        return inter.shape

    def copy(self):
        return ScalarField(self.data.copy(), self.ghosts_valid)

    def require_ghosts(self):
        if not self.ghosts_valid:
            raise StaleGhostsError("ghost frame is stale; call fill_ghosts first")


def _fill_ghost_frame(data, grid):
    """Fill the ghost frame of a full array in place (x sweep, then y)."""
    n = NG
    if grid.bc_x is BoundaryKind.PERIODIC:
        data[:n, :] = data[-2 * n:-n, :]
        data[-n:, :] = data[n:2 * n, :]
    else:
        data[:n, :] = data[n, :]
        data[-n:, :] = data[-n - 1, :]
    if grid.bc_y is BoundaryKind.PERIODIC:
        data[:, :n] = data[:, -2 * n:-n]
        data[:, -n:] = data[:, n:2 * n]
    else:
        data[:, :n] = data[:, n:n + 1]
        data[:, -n:] = data[:, -n - 1:-n]
    return data


def fill_ghosts(f: ScalarField, grid: GridSpec) -> ScalarField:
    """Return a copy of ``f`` with the ghost frame populated per the grid bc."""
    out = ScalarField(f.data.copy(), ghosts_valid=True)
    _fill_ghost_frame(out.data, grid)
    return out


def ghosted(interior, grid):
    """Raw-array helper: embed an (nx, ny) block and fill its ghost frame."""
    interior = np.asarray(interior, dtype=np.float64)
    nx, ny = interior.shape
    data = np.empty((nx + 2 * NG, ny + 2 * NG))
    data[NG:-NG, NG:-NG] = interior
    return _fill_ghost_frame(data, grid)


# Shifted interior views of a full array: offset (di, dj) in cells.
def shift(data, di, dj):
    nx = data.shape[0] - 2 * NG
    ny = data.shape[1] - 2 * NG
    return data[NG + di:NG + di + nx, NG + dj:NG + dj + ny]


def ddx(data, dx):
    """Central x-derivative of a ghosted full array, on the interior."""
    return (shift(data, 1, 0) - shift(data, -1, 0)) / (2.0 * dx)


def ddy(data, dy):
    return (shift(data, 0, 1) - shift(data, 0, -1)) / (2.0 * dy)


def lap5(data, dx, dy):
    """Standard 5-point Laplacian of a ghosted full array, on the interior."""
    c = shift(data, 0, 0)
    return ((shift(data, -1, 0) - 2.0 * c + shift(data, 1, 0)) / dx ** 2
            + (shift(data, 0, -1) - 2.0 * c + shift(data, 0, 1)) / dy ** 2)


def central_gradient(f: ScalarField, grid: GridSpec):
    """(f_{j+1,k} - f_{j-1,k})/(2dx) and (f_{j,k+1} - f_{j,k-1})/(2dy)."""
    f.require_ghosts()
    fx = ScalarField.from_interior(ddx(f.data, grid.dx))
    fy = ScalarField.from_interior(ddy(f.data, grid.dy))
    return fx, fy


def discrete_laplacian(f: ScalarField, grid: GridSpec) -> ScalarField:
    f.require_ghosts()
    return ScalarField.from_interior(lap5(f.data, grid.dx, grid.dy))


def central_divergence(u: ScalarField, v: ScalarField, grid: GridSpec) -> ScalarField:
    u.require_ghosts()
    v.require_ghosts()
    return ScalarField.from_interior(ddx(u.data, grid.dx) + ddy(v.data, grid.dy))


def jacobian_bracket(a: ScalarField, b: ScalarField, grid: GridSpec,
                     sign: int = -1) -> ScalarField:
    """Central-difference bracket of two fields.

    ``sign=-1`` gives the analytic Jacobian a_x b_y - a_y b_x; ``sign=+1``
    joins the two stencil products with a plus instead (the symmetrized
    variant).  Both use the compact (4 dx dy)^-1 four-point form.
    """
    a.require_ghosts()
    b.require_ghosts()
    out = _jacobian_raw(a.data, b.data, grid.dx, grid.dy, sign)
    return ScalarField.from_interior(out)


def _jacobian_raw(adata, bdata, dx, dy, sign):
    dax = shift(adata, 1, 0) - shift(adata, -1, 0)
    day = shift(adata, 0, 1) - shift(adata, 0, -1)
    dbx = shift(bdata, 1, 0) - shift(bdata, -1, 0)
    dby = shift(bdata, 0, 1) - shift(bdata, 0, -1)
    return (dax * dby + sign * day * dbx) / (4.0 * dx * dy)


def vorticity(u: ScalarField, v: ScalarField, grid: GridSpec) -> ScalarField:
    """v_x - u_y with the same central stencil as the gradients."""
    u.require_ghosts()
    v.require_ghosts()
    return ScalarField.from_interior(ddx(v.data, grid.dx) - ddy(u.data, grid.dy))


def detect_nonfinite(f: ScalarField):
    """First interior (j, k) holding a NaN or Inf, or None if all finite."""
    inter = f.interior
    bad = ~np.isfinite(inter)
    if not bad.any():
        return None
    flat = int(np.argmax(bad))
    return np.unravel_index(flat, inter.shape)


def detect_nonfinite_array(values):
    bad = ~np.isfinite(values)
    if not bad.any():
        return None
    flat = int(np.argmax(bad))
    return np.unravel_index(flat, values.shape)
