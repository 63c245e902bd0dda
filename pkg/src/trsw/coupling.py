"""Dual-formulation orchestration: conversions, blending, time stepping.

Each step advances the primitive solution V with the semi-implicit scheme and
the conservative solution U with the explicit ARS stages, both consuming the
same reconstruction of V.  After every stage V is blended with V(U) using the
switching weight w(eps) = exp(-c eps^p): conservative-dominated at high
Rossby number, primitive-dominated (AP) at low Rossby number.  U is kept as
computed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import conservative as cons
from . import primitive as prim
from .errors import (NegativeRadicandError, NoConvergenceError,
                     NonPositiveDepthError)
from .grid import GridSpec, ddx, ddy, detect_nonfinite_array, ghosted
from .primitive import ARS_GAMMA, PrimitiveState
from .conservative import ConservativeState


class SchemeKind(enum.Enum):
    APDFFV = "apdffv"
    EXPLICIT = "explicit"
    SIMPLIFIED_DFFV = "simplified"


@dataclass
class SchemeConfig:
    eps: float = 1.0
    nu: float = 1.0
    beta_bar: float = 0.0
    mu: float = 1.3
    cfl: float = 0.25
    switch_c: float = 2000.0
    switch_p: int = 6
    elliptic_tol: float = 1e-12
    jacobian_sign: int = -1      # -1: analytic bracket, +1: symmetrized form
    scheme: SchemeKind = SchemeKind.APDFFV
    dt_max: float | None = None  # fallback when all speeds vanish
    blend_q: str = "vorticity"   # or "keep": leave q out of the blend

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise ValueError("eps must lie in (0, 1]")
        if self.nu <= 0.0:
            raise ValueError("nu must be positive")
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if not 1.0 <= self.mu <= 2.0:
            raise ValueError("mu must lie in [1, 2]")
        if self.jacobian_sign not in (-1, 1):
            raise ValueError("jacobian_sign must be -1 or +1")
        if self.blend_q not in ("vorticity", "keep"):
            raise ValueError("blend_q must be 'vorticity' or 'keep'")


@dataclass
class DualState:
    v: PrimitiveState
    u: ConservativeState

    @property
    def t(self):
        return self.v.t

    def copy(self):
        return DualState(self.v.copy(), self.u.copy())


def v_from_u(state: ConservativeState, config, grid: GridSpec) -> PrimitiveState:
    """Primitive variables from U; q from the central-difference vorticity."""
    h = state.h.interior
    cons.check_depth(h)
    u = state.hu.interior / h
    v = state.hv.interior / h
    theta_big = state.htheta.interior / h
    phi = config.nu * (h - 1.0) / config.eps
    theta = config.nu * (theta_big - 1.0) / (2.0 * config.eps)
    omega = ddx(ghosted(v, grid), grid.dx) - ddy(ghosted(u, grid), grid.dy)
    q = omega + config.beta_bar * grid.y_row - phi / config.nu
    return PrimitiveState.from_arrays(u, v, phi, theta, q, t=state.t)


def u_from_v(state: PrimitiveState, config, grid: GridSpec | None = None) -> ConservativeState:
    """Conservative variables via h = 1 + (eps/nu) phi, Theta = 1 + 2 eps theta/nu."""
    h = 1.0 + (config.eps / config.nu) * state.phi.interior
    cons.check_depth(h)
    theta_big = 1.0 + (2.0 * config.eps / config.nu) * state.theta.interior
    return ConservativeState.from_arrays(
        h, h * state.u.interior, h * state.v.interior, h * theta_big,
        t=state.t)


def switching_weight(eps, switch_c=2000.0, switch_p=6):
    """exp(-c eps^p); ~1 in the quasi-geostrophic regime, 0 at eps ~ 1."""
    return float(np.exp(-switch_c * eps ** switch_p))


def blend(candidate: PrimitiveState, u_state: ConservativeState, w: float,
          config, grid: GridSpec) -> PrimitiveState:
    """(1-w) V(U) + w V_candidate, componentwise.

    The endpoint weights short-circuit so that an inactive branch can never
    contaminate the result (at eps = 1 the weight underflows to exactly 0).
    """
    if w == 1.0:
        return candidate
    if w == 0.0:
        out = v_from_u(u_state, config, grid)
        if config.blend_q == "keep":
            out.q = candidate.q
        out.t = candidate.t
        return out
    ref = v_from_u(u_state, config, grid)
    mixed = {}
    for name in ("u", "v", "phi", "theta", "q"):
        if name == "q" and config.blend_q == "keep":
            mixed[name] = getattr(candidate, name).interior
            continue
        mixed[name] = ((1.0 - w) * getattr(ref, name).interior
                       + w * getattr(candidate, name).interior)
    return PrimitiveState.from_arrays(mixed["u"], mixed["v"], mixed["phi"],
                                      mixed["theta"], mixed["q"],
                                      t=candidate.t)


def _dt_from_speeds(sx, sy, config, grid):
    terms = []
    if sx > 0.0:
        terms.append(grid.dx / sx)
    if sy > 0.0:
        terms.append(grid.dy / sy)
    if not terms:
        if config.dt_max is not None:
            return config.dt_max
        return 10.0 * config.cfl * min(grid.dx, grid.dy)
    dt = config.cfl * min(terms)
    if config.dt_max is not None:
        dt = min(dt, config.dt_max)
    return dt


def dt_ap(state: PrimitiveState, config, grid: GridSpec,
          bundle: prim.ResidualBundle | None = None) -> float:
    """CFL time step from the split-system speeds (eps-uniform)."""
    if bundle is not None:
        speeds = bundle.speeds
    else:
        rec, _ = prim.reconstruct_primitive(state, config, grid)
        coeffs = prim.split_coefficients(rec, config.eps)
        speeds = prim.split_speeds(rec, coeffs, config.eps, config.nu)
    return _dt_from_speeds(speeds.max_x, speeds.max_y, config, grid)


def dt_ex(state: ConservativeState, config, grid: GridSpec) -> float:
    """CFL time step from the conservative-system speeds (scales with eps)."""
    v_state = v_from_u(state, config, grid)
    rec, _ = prim.reconstruct_primitive(v_state, config, grid)
    sx, sy = cons.cu_max_speeds(rec, config)
    return _dt_from_speeds(sx, sy, config, grid)


def _primitive_source_momenta(state: PrimitiveState, config):
    """Cell-average (hu, hv) from the primitive representation.

    The conservative branch's Coriolis source is evaluated from these: with
    the dual-formulation coupling the momenta feeding the source must follow
    the stable representation, otherwise the explicit source integration at
    dt >> eps amplifies the inertial rotation without bound.
    """
    h = 1.0 + (config.eps / config.nu) * state.phi.interior
    return h * state.u.interior, h * state.v.interior


def dffv_step(dual: DualState, config, grid: GridSpec, dt: float,
              bundle=None, on_stage=None) -> DualState:
    """One ARS(2,2,2) step of both branches with per-stage blending."""
    simplified = config.scheme is SchemeKind.SIMPLIFIED_DFFV
    gamma = ARS_GAMMA
    v_n, u_n = dual.v, dual.u
    if bundle is None:
        bundle = prim.build_bundle(v_n, config, grid, simplified=simplified)
    w = switching_weight(config.eps, config.switch_c, config.switch_p)

    u_stack = u_n.stack()
    src_hu, src_hv = _primitive_source_momenta(v_n, config)
    l_n = cons.cu_rhs(bundle.rec, src_hu, src_hv, config, grid)
    u_star = u_stack + gamma * dt * l_n
    u_star_state = ConservativeState.from_arrays(*u_star, t=v_n.t)

    if w == 0.0:
        v_star = blend(v_n, u_star_state, w, config, grid)  # pure V(U*)
    else:
        v_star_cand = prim.si_stage_one(v_n, bundle, config, grid, dt, gamma)
        v_star = blend(v_star_cand, u_star_state, w, config, grid)
    if on_stage is not None:
        on_stage("star", v_star, u_star_state)

    bundle_s = prim.build_bundle(v_star, config, grid, simplified=simplified)
    src_hu_s, src_hv_s = _primitive_source_momenta(v_star, config)
    l_s = cons.cu_rhs(bundle_s.rec, src_hu_s, src_hv_s, config, grid)
    w1 = 1.0 - 1.0 / (2.0 * gamma)
    w2 = 1.0 / (2.0 * gamma)
    u_next = u_stack + dt * (w1 * l_n + w2 * l_s)
    u_next_state = ConservativeState.from_arrays(*u_next, t=v_n.t + dt)

    if w == 0.0:
        v_next = blend(v_n, u_next_state, w, config, grid)
    else:
        v_next_cand = prim.si_stage_two(v_n, bundle, v_star, bundle_s,
                                        config, grid, dt, gamma)
        v_next = blend(v_next_cand, u_next_state, w, config, grid)
    v_next.t = v_n.t + dt
    if on_stage is not None:
        on_stage("next", v_next, u_next_state)
    return DualState(v_next, u_next_state)


def explicit_step(u_state: ConservativeState, config, grid: GridSpec,
                  dt: float) -> ConservativeState:
    """SSP-RK2 step of the standalone central-upwind comparator scheme."""
    def rhs(u_stack):
        state = ConservativeState.from_arrays(*u_stack)
        v_state = v_from_u(state, config, grid)
        rec, _ = prim.reconstruct_primitive(v_state, config, grid)
        return cons.cu_rhs(rec, u_stack[cons.IHU], u_stack[cons.IHV],
                           config, grid)

    out = cons.ssp_rk2_step(u_state.stack(), rhs, dt)
    return ConservativeState.from_arrays(*out, t=u_state.t + dt)


@dataclass
class BlowUp:
    time: float
    cell: tuple | None
    detail: str = ""


@dataclass
class RunResult:
    snapshots: list = field(default_factory=list)
    blowup: BlowUp | None = None
    steps: int = 0

    @property
    def ok(self):
        return self.blowup is None


def _nonfinite_cell(dual: DualState):
    for f in (dual.u.h, dual.u.hu, dual.u.hv, dual.u.htheta,
              dual.v.u, dual.v.v, dual.v.phi, dual.v.theta, dual.v.q):
        cell = detect_nonfinite_array(f.interior)
        if cell is not None:
            return cell
    return None


def run_simulation(dual: DualState, config, grid: GridSpec, t_final: float,
                   snapshot_times=(), observer=None) -> RunResult:
    """March to t_final, landing exactly on every requested snapshot time.

    ``observer(dual)`` turns states into recorded snapshots; it defaults to
    a plain copy of the dual state.  Non-finite values or solver failures
    stop the run and are reported through ``RunResult.blowup``.
    """
    if observer is None:
        observer = lambda d: d.copy()
    result = RunResult()
    events = sorted(set(float(s) for s in snapshot_times if 0.0 < s < t_final))
    events.append(float(t_final))
    if t_final == 0.0 or any(s == 0.0 for s in snapshot_times):
        result.snapshots.append(observer(dual))
    if t_final == 0.0:
        return result

    dual = dual.copy()
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for target in events:
            while dual.t < target:
                try:
                    if config.scheme is SchemeKind.EXPLICIT:
                        dt = dt_ex(dual.u, config, grid)
                        dt, clipped = _clip(dt, dual.t, target)
                        u_next = explicit_step(dual.u, config, grid, dt)
                        if clipped:
                            u_next.t = target
                        dual = DualState(v_from_u(u_next, config, grid),
                                         u_next)
                    else:
                        bundle = prim.build_bundle(
                            dual.v, config, grid,
                            simplified=config.scheme is SchemeKind.SIMPLIFIED_DFFV)
                        dt = _dt_from_speeds(bundle.speeds.max_x,
                                             bundle.speeds.max_y, config, grid)
                        dt, clipped = _clip(dt, dual.t, target)
                        dual = dffv_step(dual, config, grid, dt, bundle=bundle)
                        if clipped:
                            dual.v.t = target
                            dual.u.t = target
                except (NonPositiveDepthError, NegativeRadicandError,
                        NoConvergenceError, FloatingPointError) as exc:
                    cell = getattr(exc, "cell", None)
                    result.blowup = BlowUp(dual.t, cell, str(exc))
                    return result
                result.steps += 1
                cell = _nonfinite_cell(dual)
                if cell is not None:
                    result.blowup = BlowUp(dual.t, cell, "non-finite value")
                    return result
            result.snapshots.append(observer(dual))
    return result


def _clip(dt, t, target):
    if not np.isfinite(dt) or dt <= 0.0:
        raise NonPositiveDepthError(f"time step collapsed (dt={dt})")
    if t + dt >= target or t + dt == t:
        return target - t, True
    return dt, False
