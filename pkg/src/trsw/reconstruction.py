"""Generalized-minmod piecewise-linear reconstruction of interface values.

Each cell carries one slope pair (sx, sy); the four one-sided interface
values of a cell derive from that pair, so the reconstruction is conservative
(cell midpoint value equals the cell average) and, for limiter parameter
mu in [1, 2], every interface value stays between the adjacent cell averages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import NG, GridSpec, ScalarField


def minmod(*args):
    """min of the arguments if all positive, max if all negative, else 0.

    Accepts scalars or broadcastable arrays and applies componentwise.
    """
    stack = np.stack([np.asarray(a, dtype=np.float64) for a in args])
    pos = np.all(stack > 0.0, axis=0)
    neg = np.all(stack < 0.0, axis=0)
    out = np.where(pos, stack.min(axis=0),
                   np.where(neg, stack.max(axis=0), 0.0))
    if out.ndim == 0:
        return float(out)
    return out


def _slopes_full(data, mu, dx, dy):
    """Limited slopes on the full ghosted array; valid on the ring-1 band."""
    sx = np.zeros_like(data)
    sy = np.zeros_like(data)
    c = data[1:-1, 1:-1]
    left = data[:-2, 1:-1]
    right = data[2:, 1:-1]
    down = data[1:-1, :-2]
    up = data[1:-1, 2:]
    sx[1:-1, 1:-1] = minmod(mu * (c - left) / dx,
                            (right - left) / (2.0 * dx),
                            mu * (right - c) / dx)
    sy[1:-1, 1:-1] = minmod(mu * (c - down) / dy,
                            (up - down) / (2.0 * dy),
                            mu * (up - c) / dy)
    return sx, sy


def compute_slopes(f: ScalarField, mu: float, grid: GridSpec):
    """Limited x/y slopes per cell; ghost-ring slopes ride along in the frame."""
    f.require_ghosts()
    sx, sy = _slopes_full(f.data, mu, grid.dx, grid.dy)
    return ScalarField(sx, ghosts_valid=False), ScalarField(sy, ghosts_valid=False)


@dataclass
class InterfaceValues:
    """One-sided point values at cell interfaces.

    x-interfaces i = 0..nx sit between cells i-1 and i:
      xm[i, k] is the value from the left cell (its east face),
      xp[i, k] the value from the right cell (its west face).
    y-interfaces are analogous with shapes (nx, ny+1).
    """

    xm: np.ndarray
    xp: np.ndarray
    ym: np.ndarray
    yp: np.ndarray


def _interfaces_full(data, sx, sy, dx, dy):
    nx = data.shape[0] - 2 * NG
    ny = data.shape[1] - 2 * NG
    # cells -1..nx-1 feed the minus side of x-interfaces 0..nx, cells 0..nx
    # the plus side; same pattern in y.
    xlo = slice(NG - 1, NG + nx)
    xhi = slice(NG, NG + nx + 1)
    rows = slice(NG, NG + ny)
    xm = data[xlo, rows] + 0.5 * dx * sx[xlo, rows]
    xp = data[xhi, rows] - 0.5 * dx * sx[xhi, rows]
    ylo = slice(NG - 1, NG + ny)
    yhi = slice(NG, NG + ny + 1)
    cols = slice(NG, NG + nx)
    ym = data[cols, ylo] + 0.5 * dy * sy[cols, ylo]
    yp = data[cols, yhi] - 0.5 * dy * sy[cols, yhi]
    return InterfaceValues(xm, xp, ym, yp)


def interface_values(f: ScalarField, slopes, grid: GridSpec) -> InterfaceValues:
    """Interface values from a field and its (sx, sy) slope pair."""
    sx, sy = slopes
    return _interfaces_full(f.data, sx.data, sy.data, grid.dx, grid.dy)


def reconstruct(f: ScalarField, mu: float, grid: GridSpec) -> InterfaceValues:
    """Convenience: slopes + interface values in one call."""
    return interface_values(f, compute_slopes(f, mu, grid), grid)


def reconstruct_stack(full_stack, mu, dx, dy):
    """Reconstruct several ghosted fields at once.

    ``full_stack`` has shape (m, nx+4, ny+4); returns four stacks shaped
    (m, nx+1, ny), (m, nx+1, ny), (m, nx, ny+1), (m, nx, ny+1).
    """
    m = full_stack.shape[0]
    nx = full_stack.shape[1] - 2 * NG
    ny = full_stack.shape[2] - 2 * NG
    xm = np.empty((m, nx + 1, ny))
    xp = np.empty((m, nx + 1, ny))
    ym = np.empty((m, nx, ny + 1))
    yp = np.empty((m, nx, ny + 1))
    for i in range(m):
        sx, sy = _slopes_full(full_stack[i], mu, dx, dy)
        iv = _interfaces_full(full_stack[i], sx, sy, dx, dy)
        xm[i], xp[i], ym[i], yp[i] = iv.xm, iv.xp, iv.ym, iv.yp
    return xm, xp, ym, yp
