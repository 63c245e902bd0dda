"""Initial conditions for the test problems, with nondimensionalization.

Scenarios defined with dimensional constants are rescaled at initialization
(lengths by L0, velocities by V0, depth by H0, buoyancy by Theta0); the
solver only ever sees nondimensional fields.  ``time_scale`` records the
seconds per nondimensional time unit so callers can express final times in
hours or days.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import DualState, SchemeConfig, SchemeKind, v_from_u
from .conservative import ConservativeState
from .grid import BoundaryKind, GridSpec, ddx, ddy, ghosted
from .primitive import PrimitiveState

SCENARIO_NAMES = ("accuracy", "wavetrain_rsw", "wavetrain_trsw",
                  "vortex_pair", "shear_flow", "shear_flow_rsw",
                  "anticyclone")


@dataclass(frozen=True)
class NondimScales:
    """Reference scales and the dimensionless numbers they induce."""

    length: float      # L0 [m]
    velocity: float    # V0 [m/s]
    buoyancy: float    # Theta0 [m/s^2]
    depth: float       # H0 [m]
    f0: float          # [1/s]
    beta: float = 0.0  # [1/(m s)]

    @property
    def time(self):
        return self.length / self.velocity

    @property
    def eps(self):
        return self.velocity / (self.length * self.f0)

    @property
    def nu(self):
        return self.buoyancy * self.depth / (self.length * self.f0) ** 2

    @property
    def beta_bar(self):
        return self.beta * self.length * self.time


@dataclass
class Scenario:
    name: str
    grid: GridSpec
    config: SchemeConfig
    initial: DualState
    t_final: float          # nondimensional
    time_scale: float = 1.0  # seconds per time unit


def dual_from_point_values(h, u, v, theta_big, config, grid,
                           t=0.0) -> DualState:
    """Cell-center sampled (h, u, v, Theta) to a synchronized dual state."""
    u_state = ConservativeState.from_arrays(h, h * u, h * v, h * theta_big,
                                            t=t)
    return DualState(v_from_u(u_state, config, grid), u_state)


def init_accuracy(grid: GridSpec, eps: float,
                  scheme=SchemeKind.APDFFV) -> DualState:
    """Smooth doubly periodic accuracy test on [0,1]^2 (beta=0, nu=1)."""
    x, y = grid.cell_centers()
    h = 1.0 + 0.9 * eps ** 2 * np.cos(2.0 * np.pi * (x + y))
    theta_big = 1.0 + 0.9 * eps * np.sin(2.0 * np.pi * x) * np.sin(2.0 * np.pi * y)
    u = np.pi * np.sin(2.0 * np.pi * x) * np.cos(2.0 * np.pi * y)
    v = np.pi * np.cos(2.0 * np.pi * x) * np.sin(2.0 * np.pi * y)
    config = SchemeConfig(eps=eps, nu=1.0, beta_bar=0.0, scheme=scheme)
    return dual_from_point_values(h, u, v, theta_big, config, grid)


def accuracy_grid(n):
    return GridSpec.make(n, n, 0.0, 1.0, 0.0, 1.0)


def init_wavetrain(grid: GridSpec, thermal: bool,
                   scheme=SchemeKind.APDFFV) -> DualState:
    """Zonal wavetrain with a Gaussian meridional envelope, eps = nu = 1."""
    d = 40.0
    x, y = grid.cell_centers()
    yc = y - 160.0
    envelope = np.exp(-yc ** 2 / d ** 2)
    shape = 1.0 + (2.0 - 4.0 * yc ** 2 / d ** 2) / d ** 2
    h = 1.0 + 0.2 * np.sin(x) * shape * envelope
    u = 0.2 * np.sin(x) * (np.sqrt(2.0) - 2.0 * yc / d ** 2) * envelope
    v = 0.2 * np.cos(x) * (2.0 * np.sqrt(2.0) * yc / d ** 2 - 1.0) * envelope
    if thermal:
        theta_big = 1.0 + 0.5 * np.cos(x) * shape * envelope
    else:
        theta_big = np.ones_like(h)
    config = SchemeConfig(eps=1.0, nu=1.0, beta_bar=0.0, scheme=scheme)
    return dual_from_point_values(h, u, v, theta_big, config, grid)


def wavetrain_grid(nx=126, ny=162):
    return GridSpec.make(nx, ny, 0.0, 2.0 * np.pi, 0.0, 320.0,
                         bc_x=BoundaryKind.PERIODIC,
                         bc_y=BoundaryKind.EXTRAPOLATE)


# --- Vortex pair interaction (dimensional constants as printed) -----------

VORTEX_F0 = 6.147e-5
VORTEX_G = 9.80616
VORTEX_H0 = 750.0
VORTEX_PHI0 = 75.0
VORTEX_L = 5.0e6  # Lx = Ly [m]


def vortex_pair_scales() -> NondimScales:
    l0 = 3.0 * (VORTEX_L + VORTEX_L) / 20.0
    v0 = VORTEX_G * VORTEX_PHI0 / (l0 * VORTEX_F0)
    return NondimScales(l0, v0, VORTEX_G, VORTEX_H0, VORTEX_F0)


def vortex_pair_grid(nx, ny=None):
    scales = vortex_pair_scales()
    side = VORTEX_L / scales.length
    return GridSpec.make(nx, ny or nx, 0.0, side, 0.0, side)


def init_vortex_pair(grid: GridSpec, scheme=SchemeKind.APDFFV):
    """Two like-signed vortices on a doubly periodic box; intermediate regime."""
    scales = vortex_pair_scales()
    lx = ly = VORTEX_L
    x, y = grid.cell_centers()
    x = x * scales.length
    y = y * scales.length

    def tilde(s, center, length):
        return 40.0 / (3.0 * np.pi) * np.sin(np.pi * (s - center) / length)

    def tilde2(s, center, length):
        return 20.0 / (3.0 * np.pi) * np.sin(2.0 * np.pi * (s - center) / length)

    centers = (0.4 * lx, 0.6 * lx)
    gauss = []
    for c in centers:
        xt = tilde(x, c, lx)
        yt = tilde(y, c, ly)
        gauss.append(np.exp(-0.5 * (xt ** 2 + yt ** 2)))
    h = VORTEX_H0 - VORTEX_PHI0 * (gauss[0] + gauss[1] - 9.0 * np.pi / 400.0)
    theta_big = VORTEX_G * (1.0 - 0.05 * np.sin(2.0 * np.pi * x / lx))
    amp = 40.0 * VORTEX_G * VORTEX_PHI0 / (3.0 * VORTEX_F0)
    u = -(amp / ly) * (tilde2(y, centers[0], ly) * gauss[0]
                       + tilde2(y, centers[1], ly) * gauss[1])
    v = (amp / lx) * (tilde2(x, centers[0], lx) * gauss[0]
                      + tilde2(x, centers[1], lx) * gauss[1])

    config = SchemeConfig(eps=scales.eps, nu=scales.nu, beta_bar=0.0,
                          scheme=scheme)
    dual = dual_from_point_values(h / VORTEX_H0, u / scales.velocity,
                                  v / scales.velocity, theta_big / VORTEX_G,
                                  config, grid)
    return dual, config, scales


# --- Shear flow evolution ---------------------------------------------------

SHEAR_F0 = 6.147e-5
SHEAR_G = 9.80616
SHEAR_H0 = 1076.0
SHEAR_PHI0 = 30.0
SHEAR_L = 5.0e6


def shear_flow_scales() -> NondimScales:
    l0 = SHEAR_L / 3.0
    v0 = SHEAR_G * SHEAR_PHI0 / (l0 * SHEAR_F0)
    return NondimScales(l0, v0, SHEAR_G, SHEAR_H0, SHEAR_F0)


def shear_flow_grid(nx, ny=None):
    scales = shear_flow_scales()
    side = SHEAR_L / scales.length
    return GridSpec.make(nx, ny or nx, 0.0, side, 0.0, side)


def _shear_flow_fields(grid: GridSpec):
    """Dimensional (h, u, v, Theta) of the zonal jet at cell centers."""
    scales = shear_flow_scales()
    x, y = grid.cell_centers()
    xt = x * scales.length / SHEAR_L
    yt = y * scales.length / SHEAR_L
    env = np.exp(0.5 - 72.0 / np.pi ** 2 * np.cos(np.pi * yt) ** 2)
    mod = 1.0 + 0.1 * np.sin(4.0 * np.pi * xt)
    h = SHEAR_H0 + 6.0 * SHEAR_PHI0 / np.pi * mod * np.sin(2.0 * np.pi * yt) * env
    u = -12.0 * SHEAR_G * SHEAR_PHI0 / (SHEAR_F0 * SHEAR_L) * mod \
        * (np.cos(2.0 * np.pi * yt)
           + 36.0 / np.pi ** 2 * np.sin(2.0 * np.pi * yt) ** 2) * env
    v = 12.0 * SHEAR_G * SHEAR_PHI0 / (5.0 * SHEAR_F0 * SHEAR_L) \
        * np.cos(4.0 * np.pi * xt) * np.sin(2.0 * np.pi * yt) * env
    theta_big = SHEAR_G * (1.0 + 0.05 * np.cos(2.0 * np.pi * xt)
                           * np.sin(2.0 * np.pi * yt))
    return h, u, v, theta_big


def init_shear_flow(grid: GridSpec, thermal: bool = True,
                    scheme=SchemeKind.APDFFV):
    """Perturbed zonal jet in the TQG regime (eps ~ 0.028)."""
    scales = shear_flow_scales()
    h, u, v, theta_big = _shear_flow_fields(grid)
    if not thermal:
        theta_big = np.full_like(h, SHEAR_G)
    config = SchemeConfig(eps=scales.eps, nu=scales.nu, beta_bar=0.0,
                          scheme=scheme)
    dual = dual_from_point_values(h / SHEAR_H0, u / scales.velocity,
                                  v / scales.velocity, theta_big / SHEAR_G,
                                  config, grid)
    return dual, config, scales


def init_shear_flow_balanced(grid: GridSpec, eps: float,
                             scheme=SchemeKind.APDFFV):
    """Well-prepared variant of the shear flow for a requested Rossby number.

    The nondimensional perturbations phi and theta of the physical setup are
    kept fixed while h and Theta are rebuilt from them at the new eps; the
    velocity is the discrete grad-perp of psi = phi + theta, so the initial
    central-difference divergence vanishes identically and the data is
    geostrophically balanced on the grid.
    """
    scales = shear_flow_scales()
    h, u, v, theta_big = _shear_flow_fields(grid)
    nu = scales.nu
    phi = (nu / scales.eps) * (h / SHEAR_H0 - 1.0)
    theta = (nu / (2.0 * scales.eps)) * (theta_big / SHEAR_G - 1.0)
    psi = ghosted(phi + theta, grid)
    u_bal = -ddy(psi, grid.dy)
    v_bal = ddx(psi, grid.dx)
    omega = ddx(ghosted(v_bal, grid), grid.dx) - ddy(ghosted(u_bal, grid), grid.dy)
    q = omega - phi / nu

    config = SchemeConfig(eps=eps, nu=nu, beta_bar=0.0, scheme=scheme)
    v_state = PrimitiveState.from_arrays(u_bal, v_bal, phi, theta, q)
    h_new = 1.0 + (eps / nu) * phi
    theta_big_new = 1.0 + (2.0 * eps / nu) * theta
    u_state = ConservativeState.from_arrays(h_new, h_new * u_bal,
                                            h_new * v_bal,
                                            h_new * theta_big_new)
    return DualState(v_state, u_state), config


# --- Anticyclone on the beta-plane -----------------------------------------

ANTI_F0 = 6.1635e-5
ANTI_BETA = 2.0746e-11
ANTI_G = 9.81
ANTI_H0 = 163.1
ANTI_A = 0.95
ANTI_D = 1.3e5
ANTI_LX = 1.0e6
ANTI_LY = 6.0e5


def anticyclone_scales() -> NondimScales:
    return NondimScales(1.0e6, 1.0, ANTI_G, ANTI_H0, ANTI_F0, ANTI_BETA)


def anticyclone_grid(nx, ny=None):
    scales = anticyclone_scales()
    lx = ANTI_LX / scales.length
    ly = ANTI_LY / scales.length
    if ny is None:
        ny = max(4, int(round(nx * ly / lx)))
    return GridSpec.make(nx, ny, -lx, lx, -ly, ly,
                         bc_x=BoundaryKind.EXTRAPOLATE,
                         bc_y=BoundaryKind.EXTRAPOLATE)


def init_anticyclone(grid: GridSpec, scheme=SchemeKind.APDFFV):
    """Gaussian anticyclone drifting westward under the beta effect."""
    scales = anticyclone_scales()
    x, y = grid.cell_centers()
    x = x * scales.length
    y = y * scales.length
    gauss = np.exp(-(x ** 2 + y ** 2) / ANTI_D ** 2)
    h = ANTI_H0 + ANTI_A * gauss
    f = ANTI_F0 + ANTI_BETA * y
    u = 2.0 * ANTI_A * ANTI_G / f * (y / ANTI_D ** 2) * gauss
    v = -2.0 * ANTI_A * ANTI_G / f * (x / ANTI_D ** 2) * gauss
    theta_big = ANTI_G * (1.0 - ANTI_A / ANTI_H0 * gauss)

    config = SchemeConfig(eps=scales.eps, nu=scales.nu,
                          beta_bar=scales.beta_bar, scheme=scheme)
    dual = dual_from_point_values(h / ANTI_H0, u / scales.velocity,
                                  v / scales.velocity, theta_big / ANTI_G,
                                  config, grid)
    return dual, config, scales


# --- Factory ----------------------------------------------------------------

_DEFAULT_MESH = {"accuracy": (64, 64), "wavetrain_rsw": (126, 162),
                 "wavetrain_trsw": (126, 162), "vortex_pair": (300, 300),
                 "shear_flow": (300, 300), "shear_flow_rsw": (300, 300),
                 "anticyclone": (400, 240)}

HOUR = 3600.0
DAY = 86400.0


def make_scenario(name, nx=None, ny=None, eps=None, scheme=SchemeKind.APDFFV,
                  t_final=None, **config_overrides) -> Scenario:
    """Build a named scenario; eps overrides apply where meaningful."""
    if name not in SCENARIO_NAMES:
        raise ValueError(f"unknown scenario '{name}'")
    dnx, dny = _DEFAULT_MESH[name]
    nx = nx or dnx
    ny = ny or dny

    if name == "accuracy":
        grid = GridSpec.make(nx, ny, 0.0, 1.0, 0.0, 1.0)
        config = SchemeConfig(eps=1.0 if eps is None else eps, nu=1.0,
                              scheme=scheme, **config_overrides)
        dual = init_accuracy(grid, config.eps, scheme)
        return Scenario(name, grid, config, dual,
                        0.01 if t_final is None else t_final)

    if name.startswith("wavetrain"):
        grid = wavetrain_grid(nx, ny)
        config = SchemeConfig(eps=1.0, nu=1.0, scheme=scheme,
                              **config_overrides)
        dual = init_wavetrain(grid, thermal=name.endswith("trsw"),
                              scheme=scheme)
        return Scenario(name, grid, config, dual,
                        20.0 * np.pi if t_final is None else t_final)

    if name == "vortex_pair":
        grid = vortex_pair_grid(nx, ny)
        dual, config, scales = init_vortex_pair(grid, scheme)
        config, dual = _override(config, eps, config_overrides, dual, grid)
        default_t = 20.0 * HOUR / scales.time
        return Scenario(name, grid, config, dual,
                        default_t if t_final is None else t_final,
                        time_scale=scales.time)

    if name.startswith("shear_flow"):
        grid = shear_flow_grid(nx, ny)
        dual, config, scales = init_shear_flow(
            grid, thermal=not name.endswith("rsw"), scheme=scheme)
        config, dual = _override(config, eps, config_overrides, dual, grid)
        default_t = 10.0 * DAY / scales.time
        return Scenario(name, grid, config, dual,
                        default_t if t_final is None else t_final,
                        time_scale=scales.time)

    grid = anticyclone_grid(nx, ny)
    dual, config, scales = init_anticyclone(grid, scheme)
    config, dual = _override(config, eps, config_overrides, dual, grid)
    default_t = 30.0 * DAY / scales.time
    return Scenario(name, grid, config, dual,
                    default_t if t_final is None else t_final,
                    time_scale=scales.time)


def _override(config, eps, overrides, dual, grid):
    """Apply overrides; the primitive half is re-derived from U so the two
    representations stay consistent when eps changes."""
    from dataclasses import replace
    changed = False
    if eps is not None and eps != config.eps:
        config = replace(config, eps=eps)
        changed = True
    if overrides:
        config = replace(config, **overrides)
        changed = True
    if changed:
        dual = DualState(v_from_u(dual.u, config, grid), dual.u)
    return config, dual
