"""Augmented primitive system: PCCU spatial residual and semi-implicit stages.

The evolved vector is V = (u, v, phi, theta, q) with the depth and buoyancy
recovered from the perturbations via h = 1 + (eps/nu) phi and
Theta = 1 + (2 eps/nu) theta.  The quasilinear system splits into a nonstiff
part (hyperbolic for the coefficient choice a = (1-eps) min h,
b = (1-eps) min Theta, discretized explicitly with the path-conservative
central-upwind scheme) and a stiff 1/eps part handled semi-implicitly: an
explicit theta/q update, a linear Helmholtz solve for the streamfunction
psi = phi + theta, and a closed-form 2x2 velocity solve per cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import HelmholtzProblem, solve_helmholtz
from .errors import NegativeRadicandError, NonPositiveDepthError
from .grid import (GridSpec, ScalarField, _jacobian_raw, ddx, ddy, ghosted,
                   lap5, shift)
from .reconstruction import minmod, reconstruct_stack

# component order inside stacked arrays
IU, IV, IPHI, ITHETA, IQ = range(5)

#: ARS(2,2,2) implicit-stage coefficient
ARS_GAMMA = 1.0 - 1.0 / np.sqrt(2.0)

_RADICAND_SLACK = -1e-14
_DEGENERATE = 1e-12


@dataclass
class PrimitiveState:
    u: ScalarField
    v: ScalarField
    phi: ScalarField
    theta: ScalarField
    q: ScalarField
    t: float = 0.0

    @classmethod
    def from_arrays(cls, u, v, phi, theta, q, t=0.0):
        return cls(ScalarField.from_interior(u), ScalarField.from_interior(v),
                   ScalarField.from_interior(phi),
                   ScalarField.from_interior(theta),
                   ScalarField.from_interior(q), t)

    def stack(self):
        """Interior cell averages stacked as (5, nx, ny)."""
        return np.stack([self.u.interior, self.v.interior, self.phi.interior,
                         self.theta.interior, self.q.interior])

    def copy(self):
        return PrimitiveState(self.u.copy(), self.v.copy(), self.phi.copy(),
                              self.theta.copy(), self.q.copy(), self.t)


@dataclass
class SplitCoefficients:
    a: float
    b: float


@dataclass
class NonstiffResidual:
    r_u: ScalarField
    r_v: ScalarField
    r_phi: ScalarField
    r_theta: ScalarField
    r_q: ScalarField

    @classmethod
    def from_stack(cls, r):
        return cls(*(ScalarField.from_interior(r[i]) for i in range(5)))

    def stack(self):
        return np.stack([self.r_u.interior, self.r_v.interior,
                         self.r_phi.interior, self.r_theta.interior,
                         self.r_q.interior])


@dataclass
class Reconstructed:
    """Interface values of V plus the derived depth/buoyancy interfaces."""

    vxm: np.ndarray  # (5, nx+1, ny)
    vxp: np.ndarray
    vym: np.ndarray  # (5, nx, ny+1)
    vyp: np.ndarray
    hxm: np.ndarray
    hxp: np.ndarray
    hym: np.ndarray
    hyp: np.ndarray
    txm: np.ndarray  # Theta at interfaces
    txp: np.ndarray
    tym: np.ndarray
    typ: np.ndarray


@dataclass
class SplitSpeeds:
    sxp: np.ndarray  # (nx+1, ny)
    sxm: np.ndarray
    syp: np.ndarray  # (nx, ny+1)
    sym: np.ndarray

    @property
    def max_x(self):
        return float(max(self.sxp.max(), -self.sxm.min()))

    @property
    def max_y(self):
        return float(max(self.syp.max(), -self.sym.min()))


@dataclass
class ResidualBundle:
    """Everything one time level contributes to both stages and branches."""

    coeffs: SplitCoefficients
    speeds: SplitSpeeds
    rec: Reconstructed
    residual: np.ndarray   # (5, nx, ny) PCCU residual
    div_v: np.ndarray      # central divergence of the cell-average velocity
    div_r_v: np.ndarray    # discrete divergence of the velocity residual
    psi: np.ndarray        # phi + theta cell averages
    r_psi: np.ndarray      # residual[IPHI] + residual[ITHETA]


def stack_ghosted(state: PrimitiveState, grid: GridSpec):
    """Ghost-filled full arrays of the five components, shape (5, nx+4, ny+4)."""
    return np.stack([ghosted(f.interior, grid) for f in
                     (state.u, state.v, state.phi, state.theta, state.q)])


def reconstruct_primitive(state: PrimitiveState, config, grid: GridSpec):
    """Interface values of V and of h, Theta (transformed from phi, theta)."""
    full = stack_ghosted(state, grid)
    vxm, vxp, vym, vyp = reconstruct_stack(full, config.mu, grid.dx, grid.dy)
    eps, nu = config.eps, config.nu
    rec = Reconstructed(
        vxm, vxp, vym, vyp,
        hxm=1.0 + (eps / nu) * vxm[IPHI], hxp=1.0 + (eps / nu) * vxp[IPHI],
        hym=1.0 + (eps / nu) * vym[IPHI], hyp=1.0 + (eps / nu) * vyp[IPHI],
        txm=1.0 + (2.0 * eps / nu) * vxm[ITHETA],
        txp=1.0 + (2.0 * eps / nu) * vxp[ITHETA],
        tym=1.0 + (2.0 * eps / nu) * vym[ITHETA],
        typ=1.0 + (2.0 * eps / nu) * vyp[ITHETA],
    )
    return rec, full


def split_coefficients(rec: Reconstructed, eps: float) -> SplitCoefficients:
    """a = (1-eps) min h, b = (1-eps) min Theta over all interface families."""
    hmin = min(rec.hxm.min(), rec.hxp.min(), rec.hym.min(), rec.hyp.min())
    tmin = min(rec.txm.min(), rec.txp.min(), rec.tym.min(), rec.typ.min())
    if hmin <= 0.0:
        raise NonPositiveDepthError(f"interface depth reached {hmin:.3e}")
    if tmin <= 0.0:
        raise NonPositiveDepthError(f"interface buoyancy reached {tmin:.3e}")
    return SplitCoefficients(a=(1.0 - eps) * hmin, b=(1.0 - eps) * tmin)


def _one_sided(um, up, lm, lp):
    sp = np.maximum(np.maximum(um + lm, up + lp), 0.0)
    sm = np.minimum(np.minimum(um - lm, up - lp), 0.0)
    return sp, sm


def _lam(h, theta, a, b, eps, nu):
    rad = nu * (h - a) * (theta - b)
    if rad.min() < _RADICAND_SLACK:
        raise NegativeRadicandError(
            f"split-speed radicand reached {rad.min():.3e}")
    return np.sqrt(np.maximum(rad, 0.0)) / eps


def split_speeds(rec: Reconstructed, coeffs: SplitCoefficients, eps, nu) -> SplitSpeeds:
    """One-sided speeds from the split-system eigenvalues u +- Lambda."""
    a, b = coeffs.a, coeffs.b
    lxm = _lam(rec.hxm, rec.txm, a, b, eps, nu)
    lxp = _lam(rec.hxp, rec.txp, a, b, eps, nu)
    lym = _lam(rec.hym, rec.tym, a, b, eps, nu)
    lyp = _lam(rec.hyp, rec.typ, a, b, eps, nu)
    sxp, sxm = _one_sided(rec.vxm[IU], rec.vxp[IU], lxm, lxp)
    syp, sym = _one_sided(rec.vym[IV], rec.vyp[IV], lym, lyp)
    return SplitSpeeds(sxp, sxm, syp, sym)


def _btilde_mv(u_eval, h_eval, t_eval, q_eval, w, a, b, eps, nu):
    """Apply the nonstiff x-direction matrix at an evaluation state to w."""
    out = np.empty_like(w)
    out[IU] = u_eval * w[IU] + ((t_eval - b) / eps) * w[IPHI] \
        + ((h_eval - b) / eps) * w[ITHETA]
    out[IV] = u_eval * w[IV]
    out[IPHI] = nu * ((h_eval - a) / eps) * w[IU] + u_eval * w[IPHI]
    out[ITHETA] = u_eval * w[ITHETA]
    out[IQ] = q_eval * w[IU] + u_eval * w[IQ]
    return out


def _ctilde_mv(v_eval, h_eval, t_eval, q_eval, w, a, b, eps, nu):
    """Apply the nonstiff y-direction matrix at an evaluation state to w."""
    out = np.empty_like(w)
    out[IU] = v_eval * w[IU]
    out[IV] = v_eval * w[IV] + ((t_eval - b) / eps) * w[IPHI] \
        + ((h_eval - b) / eps) * w[ITHETA]
    out[IPHI] = nu * ((h_eval - a) / eps) * w[IV] + v_eval * w[IPHI]
    out[ITHETA] = v_eval * w[ITHETA]
    out[IQ] = q_eval * w[IV] + v_eval * w[IQ]
    return out


def _axis_terms(vm, vp, hm, hp, tm, tp, sp, sm, mv, ivel, coeffs, eps, nu,
                simplified):
    """Per-interface diffusion and weighted jump pieces of one axis.

    Returns (dtilde, jump_lo, jump_hi); the cell-level contribution of the
    axis is  dtilde[1:] - dtilde[:-1] + cell fluctuation
             + jump_lo[:-1] - jump_hi[1:],  all divided by the spacing.
    ``ivel`` selects the advective velocity component (IU in x, IV in y).
    """
    a, b = coeffs.a, coeffs.b
    span = sp - sm
    degenerate = span < _DEGENERATE * np.maximum(1.0, np.maximum(sp, -sm))
    safe = np.where(degenerate, 1.0, span)

    jump = vp - vm
    vstar = (sp * vp - sm * vm) / safe
    dv = minmod(vp - vstar, vstar - vm)
    dtilde = (sp * sm / safe) * (jump - dv)
    dtilde[:, degenerate] = 0.0

    # across-interface fluctuation along the linear path: mean matrix x jump
    psi_jump = 0.5 * (mv(vm[ivel], hm, tm, vm[IQ], jump, a, b, eps, nu)
                      + mv(vp[ivel], hp, tp, vp[IQ], jump, a, b, eps, nu))
    if simplified:
        jump_lo = np.zeros_like(psi_jump)
        jump_hi = np.zeros_like(psi_jump)
    else:
        jump_lo = np.where(degenerate, 0.0, sp / safe) * psi_jump
        jump_hi = np.where(degenerate, 0.0, sm / safe) * psi_jump
    return dtilde, jump_lo, jump_hi


def _cell_fluctuation(vm, vp, hm, hp, tm, tp, mv, ivel, coeffs, eps, nu):
    """Within-cell fluctuation: mean matrix applied to the in-cell jump."""
    a, b = coeffs.a, coeffs.b
    diff = vm - vp
    return 0.5 * (mv(vm[ivel], hm, tm, vm[IQ], diff, a, b, eps, nu)
                  + mv(vp[ivel], hp, tp, vp[IQ], diff, a, b, eps, nu))


def _pccu_stack(full, rec, coeffs, speeds, config, grid, simplified):
    eps, nu, beta = config.eps, config.nu, config.beta_bar
    dx, dy = grid.dx, grid.dy

    dt_x, jlo_x, jhi_x = _axis_terms(
        rec.vxm, rec.vxp, rec.hxm, rec.hxp, rec.txm, rec.txp,
        speeds.sxp, speeds.sxm, _btilde_mv, IU, coeffs, eps, nu, simplified)
    dt_y, jlo_y, jhi_y = _axis_terms(
        rec.vym, rec.vyp, rec.hym, rec.hyp, rec.tym, rec.typ,
        speeds.syp, speeds.sym, _ctilde_mv, IV, coeffs, eps, nu, simplified)

    # within-cell fluctuations use the cell's east/west (north/south) values
    bcell = _cell_fluctuation(rec.vxm[:, 1:, :], rec.vxp[:, :-1, :],
                              rec.hxm[1:, :], rec.hxp[:-1, :],
                              rec.txm[1:, :], rec.txp[:-1, :],
                              _btilde_mv, IU, coeffs, eps, nu)
    ccell = _cell_fluctuation(rec.vym[:, :, 1:], rec.vyp[:, :, :-1],
                              rec.hym[:, 1:], rec.hyp[:, :-1],
                              rec.tym[:, 1:], rec.typ[:, :-1],
                              _ctilde_mv, IV, coeffs, eps, nu)

    res = (dt_x[:, 1:, :] - dt_x[:, :-1, :] + bcell
           + jlo_x[:, :-1, :] - jhi_x[:, 1:, :]) / dx
    res += (dt_y[:, :, 1:] - dt_y[:, :, :-1] + ccell
            + jlo_y[:, :, :-1] - jhi_y[:, :, 1:]) / dy

    # midpoint source: Coriolis on the momentum rows, thermal bracket on q
    cor = (1.0 - coeffs.b) / eps + beta * grid.y_row
    res[IU] -= cor * shift(full[IV], 0, 0)
    res[IV] += cor * shift(full[IU], 0, 0)
    res[IQ] -= _jacobian_raw(full[IPHI], full[ITHETA], dx, dy,
                             config.jacobian_sign) / nu
    return res


def pccu_residual(state: PrimitiveState, config, grid: GridSpec,
                  coeffs: SplitCoefficients | None = None,
                  simplified: bool = False) -> NonstiffResidual:
    """Path-conservative central-upwind discretization of the nonstiff terms."""
    rec, full = reconstruct_primitive(state, config, grid)
    if coeffs is None:
        coeffs = split_coefficients(rec, config.eps)
    speeds = split_speeds(rec, coeffs, config.eps, config.nu)
    r = _pccu_stack(full, rec, coeffs, speeds, config, grid, simplified)
    return NonstiffResidual.from_stack(r)


def _div_r_v_raw(full, coeffs, config, grid):
    """Discrete divergence of the velocity residual, the sum of three parts:

    a pointwise Coriolis/vorticity part, central second differences of the
    advection term (with its plus-joined cross product exactly as printed),
    and a compact flux form of the pressure couplings.
    """
    eps, nu, beta = config.eps, config.nu, config.beta_bar
    b = coeffs.b
    dx, dy = grid.dx, grid.dy
    u, v = full[IU], full[IV]
    phi, theta, q = full[IPHI], full[ITHETA], full[IQ]
    h = 1.0 + (eps / nu) * phi
    big_t = 1.0 + (2.0 * eps / nu) * theta
    yk = grid.y_row

    uc, vc = shift(u, 0, 0), shift(v, 0, 0)
    r1 = beta * uc - ((1.0 + eps * beta * yk - b) / eps) \
        * (shift(q, 0, 0) - beta * yk + shift(phi, 0, 0) / nu)

    u2, v2 = u * u, v * v
    r2 = (shift(u2, -1, 0) - 2.0 * shift(u2, 0, 0) + shift(u2, 1, 0)) \
        / (2.0 * dx ** 2)
    r2 += (shift(v2, 0, -1) - 2.0 * shift(v2, 0, 0) + shift(v2, 0, 1)) \
        / (2.0 * dy ** 2)
    r2 -= ((shift(u, 1, 0) - shift(u, -1, 0)) * (shift(v, 0, 1) - shift(v, 0, -1))
           + (shift(u, 0, 1) - shift(u, 0, -1)) * (shift(v, 1, 0) - shift(v, -1, 0))) \
        / (4.0 * dx * dy)
    uv = u * v
    r2 += (shift(uv, 1, 1) - shift(uv, -1, 1) - shift(uv, 1, -1)
           + shift(uv, -1, -1)) / (4.0 * dx * dy)

    def flux_form(coef, f):
        out = ((shift(coef, 0, 0) + shift(coef, 1, 0))
               * (shift(f, 1, 0) - shift(f, 0, 0))
               - (shift(coef, -1, 0) + shift(coef, 0, 0))
               * (shift(f, 0, 0) - shift(f, -1, 0))) / (2.0 * eps * dx ** 2)
        out += ((shift(coef, 0, 0) + shift(coef, 0, 1))
                * (shift(f, 0, 1) - shift(f, 0, 0))
                - (shift(coef, 0, -1) + shift(coef, 0, 0))
                * (shift(f, 0, 0) - shift(f, 0, -1))) / (2.0 * eps * dy ** 2)
        return out

    r3 = flux_form(big_t, phi) - (b / eps) * lap5(phi, dx, dy)
    r3 += flux_form(h, theta) - (b / eps) * lap5(theta, dx, dy)
    return r1 + r2 + r3


def div_velocity_residual(state: PrimitiveState, coeffs: SplitCoefficients,
                          config, grid: GridSpec) -> ScalarField:
    full = stack_ghosted(state, grid)
    return ScalarField.from_interior(_div_r_v_raw(full, coeffs, config, grid))


def build_bundle(state: PrimitiveState, config, grid: GridSpec,
                 simplified: bool = False) -> ResidualBundle:
    """Reconstruction, speeds, PCCU residual, and the divergence terms."""
    rec, full = reconstruct_primitive(state, config, grid)
    coeffs = split_coefficients(rec, config.eps)
    speeds = split_speeds(rec, coeffs, config.eps, config.nu)
    residual = _pccu_stack(full, rec, coeffs, speeds, config, grid, simplified)
    div_v = ddx(full[IU], grid.dx) + ddy(full[IV], grid.dy)
    div_r_v = _div_r_v_raw(full, coeffs, config, grid)
    psi = shift(full[IPHI], 0, 0) + shift(full[ITHETA], 0, 0)
    return ResidualBundle(coeffs=coeffs, speeds=speeds, rec=rec,
                          residual=residual, div_v=div_v, div_r_v=div_r_v,
                          psi=psi.copy(),
                          r_psi=residual[IPHI] + residual[ITHETA])


def assemble_elliptic_stage_one(theta_new, q_new, bundle: ResidualBundle,
                                config, grid: GridSpec, gdt: float) -> HelmholtzProblem:
    """Streamfunction problem of the first stage (gdt = gamma * dt)."""
    a, b = bundle.coeffs.a, bundle.coeffs.b
    eps, nu = config.eps, config.nu
    ab2 = a * b * gdt ** 2
    alpha = eps ** 2 + ab2
    delta = nu * ab2
    yk = grid.y_row
    rhs = -ab2 * (nu * q_new - nu * config.beta_bar * yk - theta_new)
    rhs -= eps * nu * a * gdt * (bundle.div_v - gdt * bundle.div_r_v)
    rhs += eps ** 2 * (bundle.psi - gdt * bundle.r_psi)
    return HelmholtzProblem(alpha, delta, rhs, grid, config.elliptic_tol)


def velocity_update_stage_one(u_n, v_n, r_u, r_v, psi_x, psi_y,
                              b: float, eps: float, gdt: float):
    """Exact solve of the 2x2 stiff velocity system of the first stage."""
    beta = b * gdt
    denom = eps ** 2 + beta ** 2
    u_new = (-eps ** 2 * gdt * r_u + eps * b * gdt ** 2 * (-r_v)
             + eps ** 2 * u_n - eps * beta * (-v_n + psi_x)
             + beta ** 2 * (-psi_y)) / denom
    v_new = (-eps ** 2 * gdt * r_v + eps * b * gdt ** 2 * r_u
             + eps ** 2 * v_n - eps * beta * (u_n + psi_y)
             + beta ** 2 * psi_x) / denom
    return u_new, v_new


def si_stage_one(state: PrimitiveState, bundle: ResidualBundle, config,
                 grid: GridSpec, dt: float,
                 gamma: float = ARS_GAMMA) -> PrimitiveState:
    """First ARS stage; with gamma=1 this is the first-order scheme's step."""
    gdt = gamma * dt
    r = bundle.residual
    theta_new = state.theta.interior - gdt * r[ITHETA]
    q_new = state.q.interior - gdt * r[IQ]

    problem = assemble_elliptic_stage_one(theta_new, q_new, bundle, config,
                                          grid, gdt)
    psi_new = solve_helmholtz(problem)
    phi_new = psi_new - theta_new

    psi_full = ghosted(psi_new, grid)
    psi_x = ddx(psi_full, grid.dx)
    psi_y = ddy(psi_full, grid.dy)
    u_new, v_new = velocity_update_stage_one(
        state.u.interior, state.v.interior, r[IU], r[IV], psi_x, psi_y,
        bundle.coeffs.b, config.eps, gdt)
    return PrimitiveState.from_arrays(u_new, v_new, phi_new, theta_new, q_new,
                                      t=state.t + dt)


def first_order_step(state: PrimitiveState, config, grid: GridSpec,
                     dt: float, bundle: ResidualBundle | None = None) -> PrimitiveState:
    """Single-stage semi-implicit update (the gamma = 1 reduction)."""
    if bundle is None:
        bundle = build_bundle(state, config, grid)
    return si_stage_one(state, bundle, config, grid, dt, gamma=1.0)


def assemble_elliptic_stage_two(theta_new, q_new, state_n: PrimitiveState,
                                bundle_n: ResidualBundle,
                                star: PrimitiveState,
                                bundle_s: ResidualBundle,
                                config, grid: GridSpec, dt: float,
                                gamma: float) -> HelmholtzProblem:
    """Streamfunction problem of the second stage, cross terms included."""
    eps, nu = config.eps, config.nu
    a_n, b_n = bundle_n.coeffs.a, bundle_n.coeffs.b
    a_s, b_s = bundle_s.coeffs.a, bundle_s.coeffs.b
    gdt = gamma * dt
    w1 = 1.0 - 1.0 / (2.0 * gamma)
    w2 = 1.0 / (2.0 * gamma)
    ab2 = a_s * b_s * gdt ** 2
    alpha = eps ** 2 + ab2
    delta = nu * ab2
    yk = grid.y_row

    psi_s_full = ghosted(bundle_s.psi, grid)
    lap_psi_s = lap5(psi_s_full, grid.dx, grid.dy)

    rhs = -ab2 * (nu * q_new - nu * config.beta_bar * yk - theta_new)
    rhs -= eps * nu * a_s * gdt * (bundle_n.div_v - w1 * dt * bundle_n.div_r_v)
    rhs -= eps * nu * (a_n * (1.0 - gamma) * dt * bundle_s.div_v
                       - a_s * gdt * w2 * dt * bundle_s.div_r_v)
    rhs += eps ** 2 * (bundle_n.psi - w1 * dt * bundle_n.r_psi
                       - w2 * dt * bundle_s.r_psi)
    rhs -= a_s * b_n * gamma * (1.0 - gamma) * dt ** 2 * (
        nu * star.q.interior - nu * config.beta_bar * yk
        + star.phi.interior - nu * lap_psi_s)
    return HelmholtzProblem(alpha, delta, rhs, grid, config.elliptic_tol)


def velocity_update_stage_two(u_n, v_n, star: PrimitiveState, r_n, r_s,
                              psi_s_x, psi_s_y, psi_new_x, psi_new_y,
                              b_n: float, b_s: float, eps: float, dt: float,
                              gamma: float):
    """Exact solve of the stage-two velocity system (the Step-6 formula)."""
    w1 = 1.0 - 1.0 / (2.0 * gamma)
    w2 = 1.0 / (2.0 * gamma)
    beta = b_s * gamma * dt
    denom = eps ** 2 + beta ** 2
    u_s, v_s = star.u.interior, star.v.interior

    # perp(w) = (-w_y, w_x); grad_perp psi = (-psi_y, psi_x)
    u_new = (-eps * w2 * dt * (eps * r_s[IU] - beta * (-r_s[IV]))
             - eps * w1 * dt * (eps * r_n[IU] - beta * (-r_n[IV]))
             - b_n * b_s * gamma * (1.0 - gamma) * dt ** 2 * (u_s - (-psi_s_y))
             + eps ** 2 * u_n
             - eps * b_n * (1.0 - gamma) * dt * (-v_s + psi_s_x)
             - eps * beta * (-v_n + psi_new_x)
             + beta ** 2 * (-psi_new_y)) / denom
    v_new = (-eps * w2 * dt * (eps * r_s[IV] - beta * r_s[IU])
             - eps * w1 * dt * (eps * r_n[IV] - beta * r_n[IU])
             - b_n * b_s * gamma * (1.0 - gamma) * dt ** 2 * (v_s - psi_s_x)
             + eps ** 2 * v_n
             - eps * b_n * (1.0 - gamma) * dt * (u_s + psi_s_y)
             - eps * beta * (u_n + psi_new_y)
             + beta ** 2 * psi_new_x) / denom
    return u_new, v_new


def si_stage_two(state_n: PrimitiveState, bundle_n: ResidualBundle,
                 star: PrimitiveState, bundle_s: ResidualBundle, config,
                 grid: GridSpec, dt: float,
                 gamma: float = ARS_GAMMA) -> PrimitiveState:
    """Second ARS stage, consuming the (possibly blended) first-stage state."""
    w1 = 1.0 - 1.0 / (2.0 * gamma)
    w2 = 1.0 / (2.0 * gamma)
    r_n, r_s = bundle_n.residual, bundle_s.residual
    theta_new = state_n.theta.interior - dt * (w1 * r_n[ITHETA] + w2 * r_s[ITHETA])
    q_new = state_n.q.interior - dt * (w1 * r_n[IQ] + w2 * r_s[IQ])

    problem = assemble_elliptic_stage_two(theta_new, q_new, state_n, bundle_n,
                                          star, bundle_s, config, grid, dt,
                                          gamma)
    psi_new = solve_helmholtz(problem)
    phi_new = psi_new - theta_new

    psi_s_full = ghosted(bundle_s.psi, grid)
    psi_new_full = ghosted(psi_new, grid)
    u_new, v_new = velocity_update_stage_two(
        state_n.u.interior, state_n.v.interior, star, r_n, r_s,
        ddx(psi_s_full, grid.dx), ddy(psi_s_full, grid.dy),
        ddx(psi_new_full, grid.dx), ddy(psi_new_full, grid.dy),
        bundle_n.coeffs.b, bundle_s.coeffs.b, config.eps, dt, gamma)
    return PrimitiveState.from_arrays(u_new, v_new, phi_new, theta_new, q_new,
                                      t=state_n.t + dt)
