"""Finite-volume solvers for the nondimensional thermal rotating shallow
water equations: a semi-implicit asymptotic-preserving scheme for the
augmented primitive system, an explicit central-upwind scheme for the
conservative system, and the dual-formulation coupling that blends them
across Rossby-number regimes."""

from .grid import (BoundaryKind, GridSpec, ScalarField, central_divergence,
                   central_gradient, detect_nonfinite, discrete_laplacian,
                   fill_ghosts, jacobian_bracket, vorticity)
from .reconstruction import InterfaceValues, compute_slopes, interface_values, minmod
from .elliptic import HelmholtzProblem, solve_helmholtz
from .primitive import (ARS_GAMMA, NonstiffResidual, PrimitiveState,
                        SplitCoefficients, build_bundle, div_velocity_residual,
                        first_order_step, pccu_residual, si_stage_one,
                        si_stage_two, split_coefficients, split_speeds)
from .conservative import (ConservativeState, cu_flux, cu_rhs, cu_speeds,
                           explicit_ars_stages, physical_flux_x,
                           physical_flux_y, ssp_rk2_step)
from .coupling import (DualState, RunResult, SchemeConfig, SchemeKind, blend,
                       dffv_step, dt_ap, dt_ex, run_simulation,
                       switching_weight, u_from_v, v_from_u)
from .scenarios import (NondimScales, Scenario, init_accuracy,
                        init_anticyclone, init_shear_flow,
                        init_shear_flow_balanced, init_vortex_pair,
                        init_wavetrain, make_scenario)
from .diagnostics import ConvergenceReport, eoc, l1_error, restrict, total_variation
from .convergence import accuracy_convergence
from .snapshots import Snapshot, make_snapshot, read_snapshot, write_snapshot
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
