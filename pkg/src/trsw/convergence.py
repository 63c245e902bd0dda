"""Mesh-refinement study for the smooth accuracy test.

Each requested mesh N is paired with the next-finer mesh 2N: the error is the
L1 distance between the solution on N and the 2x2 cell-average restriction of
the solution on 2N, so one auxiliary run at twice the finest requested mesh
closes the table.  Reported fields are h, hu, and h*Theta.
"""

from __future__ import annotations

import numpy as np

from .coupling import run_simulation
from .diagnostics import ConvergenceReport, l1_error, restrict
from .errors import TrswError
from .scenarios import make_scenario

FIELDS = ("h", "hu", "hTheta")


def _conservative_fields(dual, config):
    """h, hu, hTheta of the reported (blended primitive) solution."""
    phi = dual.v.phi.interior
    theta = dual.v.theta.interior
    h = 1.0 + (config.eps / config.nu) * phi
    theta_big = 1.0 + (2.0 * config.eps / config.nu) * theta
    return {"h": h, "hu": h * dual.v.u.interior,
            "hv": h * dual.v.v.interior, "hTheta": h * theta_big}


def _solve_accuracy(n, eps, t_final, scheme):
    scenario = make_scenario("accuracy", nx=n, ny=n, eps=eps, scheme=scheme,
                             t_final=t_final)
    result = run_simulation(scenario.initial, scenario.config, scenario.grid,
                            t_final)
    if not result.ok:
        raise TrswError(f"accuracy run blew up on mesh {n} (eps={eps}): "
                        f"{result.blowup.detail}")
    return _conservative_fields(result.snapshots[-1], scenario.config)


def accuracy_convergence(meshes, eps, t_final=0.01, scheme=None) -> ConvergenceReport:
    from .coupling import SchemeKind
    scheme = scheme or SchemeKind.APDFFV
    meshes = sorted(int(m) for m in meshes)
    solutions = {}
    for n in meshes + [2 * meshes[-1]]:
        solutions[n] = _solve_accuracy(n, eps, t_final, scheme)

    report = ConvergenceReport(meshes=list(meshes), eps=eps)
    for name in FIELDS:
        errs = []
        for n in meshes:
            from .grid import GridSpec
            grid = GridSpec.make(n, n, 0.0, 1.0, 0.0, 1.0)
            fine = restrict(solutions[2 * n][name])
            errs.append(l1_error(solutions[n][name], fine, grid))
        report.errors[name] = errs
    return report.finalize()
