"""Grid, ghost filling, and stencil operator tests."""

import numpy as np
import pytest

from trsw import (GridSpec, ScalarField, central_divergence, central_gradient,
                  detect_nonfinite, discrete_laplacian, fill_ghosts,
                  jacobian_bracket, vorticity)
from trsw.errors import StaleGhostsError
from trsw.grid import NG, BoundaryKind

from conftest import mixed_grid, open_grid, periodic_grid, random_field


def field_on(grid, fn):
    x, y = grid.cell_centers()
    return fill_ghosts(ScalarField.from_interior(fn(x, y)), grid)


def test_grid_spacings_exact():
    g = GridSpec.make(10, 20, 0.0, 1.0, -2.0, 2.0)
    assert g.dx == 0.1
    assert g.dy == 0.2
    assert g.x_centers[0] == pytest.approx(0.05)
    with pytest.raises(ValueError):
        GridSpec.make(3, 8, 0, 1, 0, 1)


def test_periodic_ghost_wrap(rng):
    g = periodic_grid(4, 4)
    vals = random_field(rng, 4, 4)
    f = fill_ghosts(ScalarField.from_interior(vals), g)
    # ghost column j = -1 wraps to interior j = nx-1
    assert np.array_equal(f.data[NG - 1, NG:-NG], vals[3, :])
    assert np.array_equal(f.data[NG + 4, NG:-NG], vals[0, :])
    assert np.array_equal(f.data[NG:-NG, NG - 2], vals[:, 2])


def test_extrapolate_ghost_copy(rng):
    g = open_grid(4, 4)
    vals = random_field(rng, 4, 4)
    f = fill_ghosts(ScalarField.from_interior(vals), g)
    assert np.array_equal(f.data[NG - 1, NG:-NG], vals[0, :])
    assert np.array_equal(f.data[NG - 2, NG:-NG], vals[0, :])
    assert np.array_equal(f.data[NG:-NG, NG + 5], vals[:, 3])


@pytest.mark.parametrize("make", [periodic_grid, open_grid, mixed_grid])
def test_constant_field_ghosts(make):
    g = make(5, 6)
    f = fill_ghosts(ScalarField.from_interior(np.full((5, 6), 3.25)), g)
    assert np.all(f.data == 3.25)


def test_stale_ghosts_fail_fast():
    g = periodic_grid(4, 4)
    f = ScalarField.from_interior(np.zeros((4, 4)))
    with pytest.raises(StaleGhostsError):
        central_gradient(f, g)


def test_gradient_constant_and_linear():
    g = open_grid(8, 8)
    c = field_on(g, lambda x, y: np.full_like(x, 7.0))
    fx, fy = central_gradient(c, g)
    assert np.all(fx.interior == 0.0)
    assert np.all(fy.interior == 0.0)

    lin = field_on(g, lambda x, y: x)
    fx, _ = central_gradient(lin, g)
    # cells at least one away from the extrapolated edges see exact slope 1
    assert np.allclose(fx.interior[1:-1, :], 1.0, atol=1e-14)


def test_gradient_matches_stencil_oracle():
    g = periodic_grid(32, 4)
    f = field_on(g, lambda x, y: np.sin(2 * np.pi * x))
    fx, _ = central_gradient(f, g)
    vals = np.sin(2 * np.pi * g.x_centers)
    expect = (np.roll(vals, -1) - np.roll(vals, 1)) / (2 * g.dx)
    assert np.allclose(fx.interior, expect[:, None], atol=1e-14)


def test_laplacian_quadratic_and_eigenfunction():
    g = open_grid(10, 10)
    f = field_on(g, lambda x, y: x ** 2 + y ** 2)
    lap = discrete_laplacian(f, g)
    assert np.allclose(lap.interior[1:-1, 1:-1], 4.0, atol=1e-11)

    gper = periodic_grid(32, 4)
    f = field_on(gper, lambda x, y: np.sin(2 * np.pi * x))
    lap = discrete_laplacian(f, gper)
    lam = (2.0 - 2.0 * np.cos(2 * np.pi * gper.dx)) / gper.dx ** 2
    assert np.allclose(lap.interior, -lam * f.interior, atol=1e-11)


def test_divergence_cases(rng):
    g = periodic_grid(8, 8)
    c = field_on(g, lambda x, y: np.full_like(x, 2.0))
    div = central_divergence(c, c, g)
    assert np.all(div.interior == 0.0)

    go = open_grid(8, 8)
    u = field_on(go, lambda x, y: x)
    v = field_on(go, lambda x, y: -y)
    div = central_divergence(u, v, go)
    assert np.allclose(div.interior[1:-1, 1:-1], 0.0, atol=1e-14)

    u = fill_ghosts(ScalarField.from_interior(random_field(rng, 8, 8)), g)
    v = fill_ghosts(ScalarField.from_interior(random_field(rng, 8, 8)), g)
    div = central_divergence(u, v, g)
    scale = np.sum(np.abs(u.interior)) + np.sum(np.abs(v.interior))
    assert abs(np.sum(div.interior)) <= 1e-12 * scale


def test_jacobian_bracket_signs(rng):
    g = periodic_grid(6, 6)
    a = fill_ghosts(ScalarField.from_interior(random_field(rng, 6, 6)), g)
    b = fill_ghosts(ScalarField.from_interior(random_field(rng, 6, 6)), g)

    jab = jacobian_bracket(a, b, g, sign=-1)
    jba = jacobian_bracket(b, a, g, sign=-1)
    assert np.allclose(jab.interior, -jba.interior, atol=1e-13)

    # direct four-point formula as oracle, both sign conventions
    ad, bd = a.data, b.data
    for sign in (-1, 1):
        got = jacobian_bracket(a, b, g, sign=sign).interior
        expect = np.zeros((6, 6))
        for j in range(6):
            for k in range(6):
                J, K = j + NG, k + NG
                expect[j, k] = ((ad[J + 1, K] - ad[J - 1, K])
                                * (bd[J, K + 1] - bd[J, K - 1])
                                + sign * (ad[J, K + 1] - ad[J, K - 1])
                                * (bd[J + 1, K] - bd[J - 1, K])) \
                    / (4 * g.dx * g.dy)
        assert np.allclose(got, expect, atol=1e-13)

    # the symmetrized form of [a, a] is twice the slope product, not zero
    jaa = jacobian_bracket(a, a, g, sign=1)
    assert np.max(np.abs(jaa.interior)) > 0.0
    assert np.allclose(jacobian_bracket(a, a, g, sign=-1).interior, 0.0)


def test_jacobian_linear_fields():
    g = open_grid(8, 8)
    a = field_on(g, lambda x, y: x)
    b = field_on(g, lambda x, y: y)
    for sign in (-1, 1):
        j = jacobian_bracket(a, b, g, sign=sign)
        # (2dx)(2dy)/(4 dx dy) = 1; the cross terms vanish for aligned linears
        assert np.allclose(j.interior[1:-1, 1:-1], 1.0, atol=1e-13)

    c = field_on(g, lambda x, y: np.full_like(x, 4.2))
    j = jacobian_bracket(c, b, g)
    assert np.all(j.interior == 0.0)


def test_vorticity_cases(rng):
    g = open_grid(8, 8)
    u = field_on(g, lambda x, y: -y)
    v = field_on(g, lambda x, y: x)
    w = vorticity(u, v, g)
    assert np.allclose(w.interior[1:-1, 1:-1], 2.0, atol=1e-13)

    gper = periodic_grid(16, 16)
    u = field_on(gper, lambda x, y: np.sin(2 * np.pi * y))
    v = field_on(gper, lambda x, y: np.sin(2 * np.pi * x))
    w = vorticity(u, v, gper)
    vx = (np.roll(v.interior, -1, axis=0) - np.roll(v.interior, 1, axis=0)) / (2 * gper.dx)
    uy = (np.roll(u.interior, -1, axis=1) - np.roll(u.interior, 1, axis=1)) / (2 * gper.dy)
    assert np.allclose(w.interior, vx - uy, atol=1e-14)


def test_stencils_are_linear(rng):
    g = periodic_grid(8, 8)
    a = random_field(rng, 8, 8)
    b = random_field(rng, 8, 8)
    fa = fill_ghosts(ScalarField.from_interior(a), g)
    fb = fill_ghosts(ScalarField.from_interior(b), g)
    fab = fill_ghosts(ScalarField.from_interior(2.0 * a - 3.0 * b), g)
    lap = discrete_laplacian
    combo = 2.0 * lap(fa, g).interior - 3.0 * lap(fb, g).interior
    assert np.allclose(lap(fab, g).interior, combo, atol=1e-12)


def test_laplacian_symmetric_periodic(rng):
    g = periodic_grid(12, 10)
    a = random_field(rng, 12, 10)
    b = random_field(rng, 12, 10)
    fa = fill_ghosts(ScalarField.from_interior(a), g)
    fb = fill_ghosts(ScalarField.from_interior(b), g)
    lhs = np.sum(discrete_laplacian(fa, g).interior * b)
    rhs = np.sum(a * discrete_laplacian(fb, g).interior)
    scale = max(abs(lhs), abs(rhs), 1.0)
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_detect_nonfinite():
    f = ScalarField.from_interior(np.zeros((5, 5)))
    assert detect_nonfinite(f) is None
    f.interior[2, 3] = np.nan
    assert detect_nonfinite(f) == (2, 3)
    f.interior[2, 3] = np.inf
    assert detect_nonfinite(f) == (2, 3)
