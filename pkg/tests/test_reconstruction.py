"""Minmod limiter and piecewise-linear reconstruction tests."""

import numpy as np
import pytest

from trsw import ScalarField, compute_slopes, fill_ghosts, interface_values, minmod
from trsw.reconstruction import reconstruct

from conftest import open_grid, periodic_grid, random_field
from oracles import NaiveGrid, naive_interfaces


def test_minmod_values():
    assert minmod(1.0, 2.0, 3.0) == 1.0
    assert minmod(-1.0, 2.0, -3.0) == 0.0
    assert minmod(-1.0, -2.0, -3.0) == -1.0
    assert minmod(0.0, 1.0, 2.0) == 0.0
    got = minmod(np.array([1.0, -1.0]), np.array([0.5, -2.0]))
    assert np.array_equal(got, np.array([0.5, -1.0]))


def test_slopes_on_linear_data():
    g = open_grid(8, 8)
    x, _ = g.cell_centers()
    f = fill_ghosts(ScalarField.from_interior(x), g)
    sx, sy = compute_slopes(f, 1.3, g)
    assert np.allclose(sx.interior[1:-1, :], 1.0, atol=1e-14)
    assert np.allclose(sy.interior, 0.0)


def test_slope_zero_at_local_max():
    g = open_grid(5, 4)
    vals = np.ones((5, 4))
    vals[2, :] = 3.0
    f = fill_ghosts(ScalarField.from_interior(vals), g)
    sx, _ = compute_slopes(f, 2.0, g)
    assert np.all(sx.interior[2, :] == 0.0)


def test_slope_hand_value():
    # row 0, 1, 4 with dx = 1: minmod(1.3*1, 4/2, 1.3*3) = 1.3
    g = open_grid(4, 4, lx=4.0, ly=4.0)
    vals = np.zeros((4, 4))
    vals[1, :] = 1.0
    vals[2, :] = 4.0
    vals[3, :] = 4.0
    f = fill_ghosts(ScalarField.from_interior(vals), g)
    sx, _ = compute_slopes(f, 1.3, g)
    assert np.allclose(sx.interior[1, :], 1.3)


def test_interface_values_flat_and_linear():
    g = periodic_grid(6, 6)
    vals = np.full((6, 6), 2.5)
    f = fill_ghosts(ScalarField.from_interior(vals), g)
    iv = interface_values(f, compute_slopes(f, 1.3, g), g)
    for arr in (iv.xm, iv.xp, iv.ym, iv.yp):
        assert np.all(arr == 2.5)

    go = open_grid(8, 6)
    x, _ = go.cell_centers()
    f = fill_ghosts(ScalarField.from_interior(x), go)
    iv = reconstruct(f, 1.3, go)
    # away from the free boundary the reconstruction is continuous
    assert np.allclose(iv.xm[2:-2, :], iv.xp[2:-2, :], atol=1e-14)


def test_interface_values_match_naive(rng):
    for make, bc in ((periodic_grid, ("periodic", "periodic")),
                     (open_grid, ("extrapolate", "extrapolate"))):
        g = make(6, 5)
        vals = random_field(rng, 6, 5)
        f = fill_ghosts(ScalarField.from_interior(vals), g)
        iv = reconstruct(f, 1.3, g)
        ng = NaiveGrid(6, 5, g.dx, g.dy, *bc)
        xm, xp, ym, yp = naive_interfaces(vals, ng, 1.3)
        assert np.allclose(iv.xm, xm, atol=1e-14)
        assert np.allclose(iv.xp, xp, atol=1e-14)
        assert np.allclose(iv.ym, ym, atol=1e-14)
        assert np.allclose(iv.yp, yp, atol=1e-14)


@pytest.mark.parametrize("mu", [1.0, 1.3, 2.0])
def test_boundedness(rng, mu):
    g = periodic_grid(10, 9)
    vals = random_field(rng, 10, 9)
    f = fill_ghosts(ScalarField.from_interior(vals), g)
    iv = reconstruct(f, mu, g)
    ext = np.vstack([vals[-1:, :], vals, vals[:1, :]])
    lo = np.minimum(ext[:-1, :], ext[1:, :])
    hi = np.maximum(ext[:-1, :], ext[1:, :])
    for arr in (iv.xm, iv.xp):
        assert np.all(arr >= lo - 1e-13)
        assert np.all(arr <= hi + 1e-13)


def test_midpoint_conservation(rng):
    g = periodic_grid(8, 8)
    vals = random_field(rng, 8, 8)
    f = fill_ghosts(ScalarField.from_interior(vals), g)
    iv = reconstruct(f, 1.3, g)
    # average of the two one-sided values of each cell equals the average
    mid_x = 0.5 * (iv.xm[1:, :] + iv.xp[:-1, :])
    assert np.allclose(mid_x, vals, atol=1e-14)
