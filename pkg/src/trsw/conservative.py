"""Central-upwind scheme for the conservative system U = (h, hu, hv, hTheta).

Interface values of U are transformed from the reconstructed primitive
variables; the Coriolis source is a midpoint-rule cell term.  Two explicit
integrators live here: the ARS(2,2,2) explicit part used by the
dual-formulation branch and the SSP-RK2 stepper of the standalone Explicit
comparator scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeRadicandError, NonPositiveDepthError
from .grid import GridSpec, ScalarField
from .primitive import IU, IV, IPHI, ITHETA, Reconstructed

IH, IHU, IHV, IHT = range(4)

H_MIN = 1e-12
_RADICAND_SLACK = -1e-14


@dataclass
class ConservativeState:
    h: ScalarField
    hu: ScalarField
    hv: ScalarField
    htheta: ScalarField
    t: float = 0.0

    @classmethod
    def from_arrays(cls, h, hu, hv, htheta, t=0.0):
        return cls(ScalarField.from_interior(h), ScalarField.from_interior(hu),
                   ScalarField.from_interior(hv),
                   ScalarField.from_interior(htheta), t)

    def stack(self):
        return np.stack([self.h.interior, self.hu.interior, self.hv.interior,
                         self.htheta.interior])

    def copy(self):
        return ConservativeState(self.h.copy(), self.hu.copy(),
                                 self.hv.copy(), self.htheta.copy(), self.t)


def check_depth(h):
    hmin = float(np.min(h))
    if hmin <= H_MIN:
        raise NonPositiveDepthError(f"depth reached {hmin:.3e}")


def physical_flux_x(u_stack, eps, nu):
    """F(U) = (hu, hu^2 + nu/(2 eps^2) Theta h^2, huv, hu Theta)."""
    h, hu, hv, ht = u_stack
    check_depth(h)
    vel = hu / h
    theta = ht / h
    out = np.empty_like(u_stack)
    out[IH] = hu
    out[IHU] = hu * vel + 0.5 * nu / eps ** 2 * theta * h * h
    out[IHV] = hv * vel
    out[IHT] = ht * vel
    return out


def physical_flux_y(u_stack, eps, nu):
    h, hu, hv, ht = u_stack
    check_depth(h)
    vel = hv / h
    theta = ht / h
    out = np.empty_like(u_stack)
    out[IH] = hv
    out[IHU] = hu * vel
    out[IHV] = hv * vel + 0.5 * nu / eps ** 2 * theta * h * h
    out[IHT] = ht * vel
    return out


def cu_speeds(um, up, hthetam, hthetap, eps, nu):
    """One-sided speeds u -+ sqrt(nu h Theta)/eps enveloped with 0."""
    radm = nu * hthetam
    radp = nu * hthetap
    worst = min(radm.min(), radp.min())
    if worst < _RADICAND_SLACK:
        raise NegativeRadicandError(f"wave-speed radicand reached {worst:.3e}")
    cm = np.sqrt(np.maximum(radm, 0.0)) / eps
    cp = np.sqrt(np.maximum(radp, 0.0)) / eps
    sp = np.maximum(np.maximum(um + cm, up + cp), 0.0)
    sm = np.minimum(np.minimum(um - cm, up - cp), 0.0)
    return sp, sm


def cu_flux(u_minus, u_plus, sm, sp, eps, nu, axis):
    """Central-upwind numerical flux through one interface family."""
    flux = physical_flux_x if axis == "x" else physical_flux_y
    fm = flux(u_minus, eps, nu)
    fp = flux(u_plus, eps, nu)
    span = sp - sm
    both_zero = (sp == 0.0) & (sm == 0.0)
    safe = np.where(both_zero, 1.0, span)
    out = (sp * fm - sm * fp) / safe + (sp * sm / safe) * (u_plus - u_minus)
    central = 0.5 * (fm + fp)
    return np.where(both_zero[None, :, :], central, out)


def interface_conservative(rec: Reconstructed):
    """Transform reconstructed primitive interface values to U = U(V)."""
    def pack(h, theta, vstack):
        return np.stack([h, h * vstack[IU], h * vstack[IV], h * theta])

    return (pack(rec.hxm, rec.txm, rec.vxm), pack(rec.hxp, rec.txp, rec.vxp),
            pack(rec.hym, rec.tym, rec.vym), pack(rec.hyp, rec.typ, rec.vyp))


def cu_rhs(rec: Reconstructed, source_hu, source_hv, config,
           grid: GridSpec):
    """Semi-discrete right-hand side: flux differences plus midpoint source.

    ``source_hu``/``source_hv`` are the cell-average momenta entering the
    Coriolis source; the caller chooses which representation supplies them.
    """
    eps, nu = config.eps, config.nu
    uxm, uxp, uym, uyp = interface_conservative(rec)
    sxp, sxm = cu_speeds(rec.vxm[IU], rec.vxp[IU],
                         uxm[IHT], uxp[IHT], eps, nu)
    syp, sym = cu_speeds(rec.vym[IV], rec.vyp[IV],
                         uym[IHT], uyp[IHT], eps, nu)
    fx = cu_flux(uxm, uxp, sxm, sxp, eps, nu, "x")
    gy = cu_flux(uym, uyp, sym, syp, eps, nu, "y")

    rhs = -(fx[:, 1:, :] - fx[:, :-1, :]) / grid.dx
    rhs -= (gy[:, :, 1:] - gy[:, :, :-1]) / grid.dy
    cor = (1.0 + eps * config.beta_bar * grid.y_row) / eps
    rhs[IHU] += cor * source_hv
    rhs[IHV] -= cor * source_hu
    return rhs


def cu_max_speeds(rec: Reconstructed, config):
    """Largest one-sided conservative-system speeds per axis (for dt)."""
    eps, nu = config.eps, config.nu
    sxp, sxm = cu_speeds(rec.vxm[IU], rec.vxp[IU],
                         rec.hxm * rec.txm, rec.hxp * rec.txp, eps, nu)
    syp, sym = cu_speeds(rec.vym[IV], rec.vyp[IV],
                         rec.hym * rec.tym, rec.hyp * rec.typ, eps, nu)
    return (float(max(sxp.max(), -sxm.min())),
            float(max(syp.max(), -sym.min())))


def explicit_ars_stages(u_stack, rhs_fn, dt, gamma):
    """Explicit part of ARS(2,2,2): returns (U*, U^{n+1})."""
    l_n = rhs_fn(u_stack)
    u_star = u_stack + gamma * dt * l_n
    l_s = rhs_fn(u_star)
    w1 = 1.0 - 1.0 / (2.0 * gamma)
    w2 = 1.0 / (2.0 * gamma)
    u_next = u_stack + dt * (w1 * l_n + w2 * l_s)
    return u_star, u_next


def ssp_rk2_step(u_stack, rhs_fn, dt):
    """Heun step: average of the forward-Euler predictor and its correction."""
    u1 = u_stack + dt * rhs_fn(u_stack)
    return 0.5 * u_stack + 0.5 * (u1 + dt * rhs_fn(u1))
