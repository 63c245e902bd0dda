"""Scenario initial data and nondimensionalization tests."""

import numpy as np
import pytest

from trsw import GridSpec, SchemeConfig
from trsw.coupling import u_from_v, v_from_u
from trsw.diagnostics import restrict
from trsw.grid import ddx, ddy, ghosted
from trsw.scenarios import (anticyclone_grid, anticyclone_scales,
                            init_accuracy, init_anticyclone, init_shear_flow,
                            init_shear_flow_balanced, init_vortex_pair,
                            init_wavetrain, make_scenario, shear_flow_grid,
                            shear_flow_scales, vortex_pair_grid,
                            vortex_pair_scales, wavetrain_grid)


def test_printed_parameter_values():
    vp = vortex_pair_scales()
    assert abs(vp.eps - 0.087) <= 1e-3
    assert abs(vp.nu - 0.865) <= 1e-3

    sf = shear_flow_scales()
    assert abs(sf.eps - 0.028) <= 1e-3
    assert abs(sf.nu - 1.005) <= 1e-3

    ac = anticyclone_scales()
    assert abs(ac.eps - 0.016) <= 1e-3
    assert abs(ac.nu - 0.421) <= 1e-3
    assert ac.beta_bar == pytest.approx(20.746, rel=1e-12)


def test_accuracy_point_values():
    # nx = 6 puts a cell center exactly at x = y = 0.25
    g = GridSpec.make(6, 6, 0.0, 1.0, 0.0, 1.0)
    dual = init_accuracy(g, 1.0)
    j = k = 1
    assert g.x_centers[j] == pytest.approx(0.25)
    assert dual.u.h.interior[j, k] == pytest.approx(1.0 + 0.9 * np.cos(np.pi))
    theta_big = dual.u.htheta.interior[j, k] / dual.u.h.interior[j, k]
    assert theta_big == pytest.approx(1.9)
    u = dual.u.hu.interior[j, k] / dual.u.h.interior[j, k]
    assert abs(u) <= 1e-15  # pi sin(pi/2) cos(pi/2)

    tiny = init_accuracy(g, 1e-8)
    assert np.allclose(tiny.u.h.interior, 1.0, atol=1e-13)
    assert np.allclose(tiny.u.htheta.interior / tiny.u.h.interior, 1.0,
                       atol=1e-7)


def test_wavetrain_centerline_and_far_field():
    from trsw.grid import BoundaryKind
    # odd ny puts a cell center exactly on y = 160
    g = GridSpec.make(8, 5, 0.0, 2 * np.pi, 0.0, 320.0,
                      bc_x=BoundaryKind.PERIODIC,
                      bc_y=BoundaryKind.EXTRAPOLATE)
    dual = init_wavetrain(g, thermal=False)
    k = 2
    assert g.y_centers[k] == pytest.approx(160.0)
    d = 40.0
    x = g.x_centers
    expect = 1.0 + 0.2 * np.sin(x) * (1.0 + 2.0 / d ** 2)
    assert np.allclose(dual.u.h.interior[:, k], expect, rtol=1e-14)
    # far field (|y_c| = 3.2 d): Gaussian envelope kills the perturbation
    assert np.allclose(dual.u.h.interior[:, 0], 1.0, atol=1e-4)
    hu = dual.u.hu.interior
    assert np.allclose(hu[:, 0], 0.0, atol=1e-4)
    # rsw flag freezes the buoyancy at one
    assert np.allclose(dual.u.htheta.interior, dual.u.h.interior, atol=1e-15)

    trsw_dual = init_wavetrain(g, thermal=True)
    theta_big = trsw_dual.u.htheta.interior / trsw_dual.u.h.interior
    expect_t = 1.0 + 0.5 * np.cos(x) * (1.0 + 2.0 / d ** 2)
    assert np.allclose(theta_big[:, k], expect_t, rtol=1e-12)


def test_vortex_pair_fields():
    g = vortex_pair_grid(32)
    dual, config, scales = init_vortex_pair(g)
    # buoyancy amplitude is the printed 5 percent modulation
    theta_big = dual.u.htheta.interior / dual.u.h.interior
    assert theta_big.max() <= 1.05 + 1e-12
    assert theta_big.min() >= 0.95 - 1e-12
    # corner cell: both Gaussians negligible, background offset remains
    h_corner = dual.u.h.interior[0, 0]
    assert h_corner == pytest.approx(1.0 + 0.1 * 9.0 * np.pi / 400.0, abs=1e-4)
    assert config.eps == pytest.approx(scales.eps)


def test_shear_flow_fields():
    # odd mesh puts a row of centers on the jet centerline y~ = 1/2
    g = shear_flow_grid(25)
    dual, config, _ = init_shear_flow(g)
    theta_big = dual.u.htheta.interior / dual.u.h.interior
    assert theta_big.max() <= 1.05 + 1e-12
    assert theta_big.min() >= 0.95 - 1e-12
    k = 12
    assert g.y_centers[k] == pytest.approx(1.5)
    v = dual.u.hv.interior[:, k] / dual.u.h.interior[:, k]
    assert np.allclose(v, 0.0, atol=1e-13)

    rsw_dual, _, _ = init_shear_flow(g, thermal=False)
    assert np.allclose(rsw_dual.u.htheta.interior, rsw_dual.u.h.interior)


def test_anticyclone_fields():
    g = anticyclone_grid(25, 15)
    dual, config, scales = init_anticyclone(g)
    x, y = g.cell_centers()
    j, k = 12, 7
    assert x[j, k] == pytest.approx(0.0)
    assert y[j, k] == pytest.approx(0.0)
    from trsw.scenarios import ANTI_A, ANTI_H0
    assert dual.u.h.interior[j, k] == pytest.approx((ANTI_H0 + ANTI_A) / ANTI_H0)
    theta_big = dual.u.htheta.interior[j, k] / dual.u.h.interior[j, k]
    assert theta_big == pytest.approx(1.0 - ANTI_A / ANTI_H0)
    assert config.beta_bar == pytest.approx(20.746)


@pytest.mark.parametrize("name,nx,ny", [
    ("accuracy", 8, 8), ("wavetrain_rsw", 12, 16), ("wavetrain_trsw", 12, 16),
    ("vortex_pair", 16, 16), ("shear_flow", 16, 16),
    ("shear_flow_rsw", 16, 16), ("anticyclone", 20, 12)])
def test_every_scenario_valid_and_roundtrips(name, nx, ny):
    sc = make_scenario(name, nx=nx, ny=ny)
    h = sc.initial.u.h.interior
    theta_big = sc.initial.u.htheta.interior / h
    assert np.all(h > 0.0)
    assert np.all(theta_big > 0.0)
    back = u_from_v(sc.initial.v, sc.config, sc.grid)
    for fname in ("h", "hu", "hv", "htheta"):
        a = getattr(sc.initial.u, fname).interior
        b = getattr(back, fname).interior
        assert np.max(np.abs(a - b)) <= 1e-13 * max(1.0, np.max(np.abs(a)))


def test_unknown_scenario_rejected():
    with pytest.raises(ValueError):
        make_scenario("nope", nx=8)


def test_eps_override_keeps_conservative_data():
    sc1 = make_scenario("shear_flow", nx=16, ny=16)
    sc2 = make_scenario("shear_flow", nx=16, ny=16, eps=1e-3)
    assert np.array_equal(sc1.initial.u.h.interior, sc2.initial.u.h.interior)
    assert sc2.config.eps == 1e-3
    # primitive half rebuilt consistently for the new eps
    back = u_from_v(sc2.initial.v, sc2.config, sc2.grid)
    assert np.allclose(back.h.interior, sc2.initial.u.h.interior, atol=1e-13)


def test_balanced_shear_flow_is_divergence_free():
    g = shear_flow_grid(24)
    dual, config = init_shear_flow_balanced(g, eps=1e-3)
    div = ddx(ghosted(dual.v.u.interior, g), g.dx) \
        + ddy(ghosted(dual.v.v.interior, g), g.dy)
    assert np.max(np.abs(div)) <= 1e-12
    assert config.eps == 1e-3
    assert np.all(dual.u.h.interior > 0.0)


def test_restriction_preserves_sums(rng):
    f = rng.uniform(-1, 1, size=(16, 12))
    coarse = restrict(f)
    assert coarse.shape == (8, 6)
    assert np.sum(coarse) * 4 == pytest.approx(np.sum(f), rel=1e-14)
