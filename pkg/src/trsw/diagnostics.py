"""L1 errors, experimental orders of convergence, and mesh transfer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .grid import GridSpec


def l1_error(f, g, grid: GridSpec) -> float:
    """Cell-area weighted L1 distance of two fields on the same grid."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.shape != (grid.nx, grid.ny):
        raise DimensionMismatchError(
            f"incompatible shapes {f.shape}, {g.shape} on "
            f"{grid.nx}x{grid.ny} grid")
    return float(grid.cell_area * np.sum(np.abs(f - g)))


def l1_norm(f, grid: GridSpec) -> float:
    return float(grid.cell_area * np.sum(np.abs(np.asarray(f))))


def restrict(fine):
    """2x2 cell averaging onto the coarser mesh; preserves the domain sum."""
    fine = np.asarray(fine)
    nx, ny = fine.shape
    if nx % 2 or ny % 2:
        raise DimensionMismatchError("restriction needs even cell counts")
    return 0.25 * (fine[0::2, 0::2] + fine[1::2, 0::2]
                   + fine[0::2, 1::2] + fine[1::2, 1::2])


def eoc(errors):
    """log2 ratios of consecutive errors (meshes refined by factor 2)."""
    errors = list(errors)
    return [float(np.log2(errors[i] / errors[i + 1]))
            for i in range(len(errors) - 1)]


def total_variation(f, grid: GridSpec) -> float:
    """Discrete total variation: sum of absolute neighbor differences."""
    f = np.asarray(f)
    tv = np.sum(np.abs(np.diff(f, axis=0))) * grid.dy
    tv += np.sum(np.abs(np.diff(f, axis=1))) * grid.dx
    return float(tv)


@dataclass
class ConvergenceReport:
    """Per-field L1 errors against the restricted next-finer solution."""

    meshes: list
    eps: float
    errors: dict = field(default_factory=dict)   # field -> [error per mesh]
    orders: dict = field(default_factory=dict)   # field -> [None, eoc...]

    def finalize(self):
        for name, errs in self.errors.items():
            self.orders[name] = [None] + eoc(errs)
        return self
