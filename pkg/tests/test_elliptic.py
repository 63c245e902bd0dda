"""Helmholtz solver tests: degenerate limits, manufactured solutions."""

import numpy as np
import pytest

from trsw import GridSpec, HelmholtzProblem, ScalarField, discrete_laplacian, fill_ghosts, solve_helmholtz
from trsw.elliptic import residual_norm
from trsw.errors import NoConvergenceError

from conftest import mixed_grid, open_grid, periodic_grid, random_field


def smooth_field(grid, rng):
    x, y = grid.cell_centers()
    lx = grid.x_max - grid.x_min
    ly = grid.y_max - grid.y_min
    out = np.zeros_like(x)
    for _ in range(4):
        ax, ay, ph = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, np.pi)
        kx, ky = rng.integers(1, 4), rng.integers(1, 4)
        out += ax * np.sin(2 * np.pi * kx * (x - grid.x_min) / lx + ph)
        out += ay * np.cos(2 * np.pi * ky * (y - grid.y_min) / ly)
    return out


def operator_rhs(psi, alpha, delta, grid):
    f = fill_ghosts(ScalarField.from_interior(psi), grid)
    return alpha * psi - delta * discrete_laplacian(f, grid).interior


def test_zero_diffusion_is_pointwise(rng):
    g = periodic_grid(8, 8)
    rhs = random_field(rng, 8, 8)
    psi = solve_helmholtz(HelmholtzProblem(2.0, 0.0, rhs, g))
    assert np.array_equal(psi, rhs / 2.0)


def test_constant_rhs_periodic():
    g = periodic_grid(16, 16)
    rhs = np.full((16, 16), 3.0)
    psi = solve_helmholtz(HelmholtzProblem(1.5, 0.7, rhs, g))
    assert np.allclose(psi, 2.0, atol=1e-12)


@pytest.mark.parametrize("make", [periodic_grid, open_grid, mixed_grid])
@pytest.mark.parametrize("n", [32, 64])
def test_manufactured_recovery(rng, make, n):
    g = make(n, n)
    psi_hat = smooth_field(g, rng)
    # solver-realistic coefficients: alpha = eps^2 + ab dt^2, delta = nu ab dt^2
    eps = 0.05
    ab = 0.8
    dt2 = (0.25 * 0.3 * g.dx) ** 2
    alpha = eps ** 2 + ab * dt2
    delta = 1.0 * ab * dt2
    tol = 1e-12
    rhs = operator_rhs(psi_hat, alpha, delta, g)
    psi = solve_helmholtz(HelmholtzProblem(alpha, delta, rhs, g, tol))
    err = np.max(np.abs(psi - psi_hat))
    assert err <= 10.0 * tol * max(1.0, np.max(np.abs(rhs))) / alpha


def test_residual_bound_after_solve(rng):
    g = open_grid(48, 40)
    rhs = smooth_field(g, rng)
    prob = HelmholtzProblem(1.0, 0.3 * g.dx ** 2, rhs, g, 1e-12)
    psi = solve_helmholtz(prob)
    assert residual_norm(psi, prob) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_two_initial_guesses_agree(rng):
    g = open_grid(24, 24)
    rhs = smooth_field(g, rng)
    prob = HelmholtzProblem(0.5, 0.2 * g.dx ** 2, rhs, g, 1e-13)
    psi0 = solve_helmholtz(prob)
    psi1 = solve_helmholtz(prob, x0=rng.uniform(-1, 1, size=(24, 24)))
    assert np.max(np.abs(psi0 - psi1)) <= 1e-10


def test_delta_to_zero_limit(rng):
    g = periodic_grid(16, 16)
    rhs = smooth_field(g, rng)
    psi = solve_helmholtz(HelmholtzProblem(1.0, 1e-12, rhs, g))
    assert np.allclose(psi, rhs, atol=1e-9)


def test_no_convergence_raises(rng):
    # a tolerance below round-off exhausts the iteration cap
    g = open_grid(16, 16)
    rhs = smooth_field(g, rng)
    with pytest.raises(NoConvergenceError):
        solve_helmholtz(HelmholtzProblem(1.0, 1.0, rhs, g, 1e-30))


def test_alpha_must_be_positive():
    g = periodic_grid(8, 8)
    with pytest.raises(ValueError):
        solve_helmholtz(HelmholtzProblem(0.0, 1.0, np.zeros((8, 8)), g))
