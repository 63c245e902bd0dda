"""Command-line front end.

Subcommands:
  run          advance one scenario and write snapshot files
  convergence  mesh-refinement study of the accuracy scenario
  compare      run the dual-formulation and Explicit schemes back to back

Exit codes: 0 success, 1 usage or configuration error, 2 blow-up detected
(a report is still written).  A ``key = value`` config file may supply any
option; command-line flags take precedence over it.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .convergence import accuracy_convergence
from .coupling import SchemeKind, run_simulation
from .errors import TrswError
from .diagnostics import l1_error
from .scenarios import SCENARIO_NAMES, make_scenario
from .snapshots import make_snapshot, write_convergence, write_snapshot

_SCHEMES = {"apdffv": SchemeKind.APDFFV, "explicit": SchemeKind.EXPLICIT,
            "simplified": SchemeKind.SIMPLIFIED_DFFV}

_CONFIG_KEYS = ("scenario", "nx", "ny", "eps", "nu", "beta_bar", "mu", "cfl",
                "scheme", "tfinal", "snapshots", "out_dir", "elliptic_tol",
                "jacobian_sign", "binary")


def _build_parser():
    parser = argparse.ArgumentParser(prog="trsw")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file of defaults")
        p.add_argument("--scenario", choices=SCENARIO_NAMES)
        p.add_argument("--nx", type=int)
        p.add_argument("--ny", type=int)
        p.add_argument("--eps", type=float)
        p.add_argument("--nu", type=float)
        p.add_argument("--beta-bar", dest="beta_bar", type=float)
        p.add_argument("--mu", type=float)
        p.add_argument("--cfl", type=float)
        p.add_argument("--elliptic-tol", dest="elliptic_tol", type=float)
        p.add_argument("--jacobian-sign", dest="jacobian_sign", type=int,
                       choices=(-1, 1))
        p.add_argument("--tfinal", type=float,
                       help="final time (nondimensional units)")
        p.add_argument("--snap", dest="snapshots",
                       help="comma-separated snapshot times")
        p.add_argument("--out", dest="out_dir")
        p.add_argument("--binary", action="store_true", default=None)

    run_p = sub.add_parser("run", help="advance one scenario")
    common(run_p)
    run_p.add_argument("--scheme", choices=sorted(_SCHEMES))

    conv_p = sub.add_parser("convergence", help="accuracy refinement study")
    common(conv_p)
    conv_p.add_argument("--scheme", choices=sorted(_SCHEMES))
    conv_p.add_argument("--meshes", help="comma-separated cell counts")
    conv_p.add_argument("--eps-list", dest="eps_list",
                        help="comma-separated Rossby numbers")

    cmp_p = sub.add_parser("compare",
                           help="run apdffv and explicit back to back")
    common(cmp_p)
    return parser


def _read_config_file(path):
    values = {}
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"malformed config line: {raw.rstrip()}")
                key, val = (tok.strip() for tok in line.split("=", 1))
                if key not in _CONFIG_KEYS:
                    raise ValueError(f"unknown config key: {key}")
                values[key] = val
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}")
    return values


_CASTS = {"nx": int, "ny": int, "eps": float, "nu": float, "beta_bar": float,
          "mu": float, "cfl": float, "tfinal": float, "elliptic_tol": float,
          "jacobian_sign": int,
          "binary": lambda s: s.lower() in ("1", "true", "yes")}


def _merge(args):
    """Config-file values fill in for flags that were not given."""
    merged = vars(args).copy()
    if args.config:
        filevals = _read_config_file(args.config)
        for key, raw in filevals.items():
            dest = "out_dir" if key == "out_dir" else key
            if merged.get(dest) is None:
                merged[dest] = _CASTS.get(key, str)(raw)
    return merged


def _parse_times(text):
    if not text:
        return ()
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _scenario_kwargs(opts):
    kwargs = {}
    for key in ("nu", "beta_bar", "mu", "cfl", "elliptic_tol",
                "jacobian_sign"):
        if opts.get(key) is not None:
            kwargs[key] = opts[key]
    return kwargs


def _write_run(result, scenario, out_dir, binary):
    os.makedirs(out_dir, exist_ok=True)
    for i, dual in enumerate(result.snapshots):
        snap = make_snapshot(dual, scenario.config, scenario.grid)
        name = f"snapshot_{i:03d}_t{snap.t:.6g}.csv"
        write_snapshot(snap, os.path.join(out_dir, name), binary=binary)
    if result.blowup is not None:
        with open(os.path.join(out_dir, "blowup.txt"), "w") as fh:
            fh.write(f"time = {result.blowup.time:.17g}\n")
            fh.write(f"cell = {result.blowup.cell}\n")
            fh.write(f"detail = {result.blowup.detail}\n")


def _cmd_run(opts):
    if not opts.get("scenario"):
        print("run: --scenario is required", file=sys.stderr)
        return 1
    if not opts.get("out_dir"):
        print("run: --out is required", file=sys.stderr)
        return 1
    scheme = _SCHEMES[opts.get("scheme") or "apdffv"]
    scenario = make_scenario(opts["scenario"], nx=opts.get("nx"),
                             ny=opts.get("ny"), eps=opts.get("eps"),
                             scheme=scheme, t_final=opts.get("tfinal"),
                             **_scenario_kwargs(opts))
    snaps = _parse_times(opts.get("snapshots"))
    result = run_simulation(scenario.initial, scenario.config, scenario.grid,
                            scenario.t_final, snapshot_times=snaps)
    _write_run(result, scenario, opts["out_dir"], bool(opts.get("binary")))
    return 0 if result.ok else 2


def _cmd_convergence(opts):
    if not opts.get("out_dir"):
        print("convergence: --out is required", file=sys.stderr)
        return 1
    scenario = opts.get("scenario") or "accuracy"
    if scenario != "accuracy":
        print("convergence: only the accuracy scenario is supported",
              file=sys.stderr)
        return 1
    meshes = [int(tok) for tok in
              (opts.get("meshes") or "16,32,64,128,256").split(",")]
    eps_list = [float(tok) for tok in
                (opts.get("eps_list") or "1,1e-2,1e-4,1e-6").split(",")]
    scheme = _SCHEMES[opts.get("scheme") or "apdffv"]
    t_final = opts.get("tfinal") or 0.01
    os.makedirs(opts["out_dir"], exist_ok=True)
    for eps in eps_list:
        report = accuracy_convergence(meshes, eps, t_final, scheme)
        path = os.path.join(opts["out_dir"], f"convergence_eps{eps:g}.csv")
        write_convergence(report, path)
    return 0


def _cmd_compare(opts):
    if not opts.get("scenario") or not opts.get("out_dir"):
        print("compare: --scenario and --out are required", file=sys.stderr)
        return 1
    snaps = _parse_times(opts.get("snapshots"))
    results = {}
    codes = []
    for label, scheme in (("apdffv", SchemeKind.APDFFV),
                          ("explicit", SchemeKind.EXPLICIT)):
        scenario = make_scenario(opts["scenario"], nx=opts.get("nx"),
                                 ny=opts.get("ny"), eps=opts.get("eps"),
                                 scheme=scheme, t_final=opts.get("tfinal"),
                                 **_scenario_kwargs(opts))
        result = run_simulation(scenario.initial, scenario.config,
                                scenario.grid, scenario.t_final,
                                snapshot_times=snaps)
        out_dir = os.path.join(opts["out_dir"], label)
        _write_run(result, scenario, out_dir, bool(opts.get("binary")))
        results[label] = (result, scenario)
        codes.append(0 if result.ok else 2)

    ap_result, scenario = results["apdffv"]
    ex_result, _ = results["explicit"]
    report_path = os.path.join(opts["out_dir"], "l1_difference.txt")
    with open(report_path, "w") as fh:
        fh.write("# L1 differences apdffv vs explicit\n")
        if ap_result.ok and ex_result.ok:
            ap_snap = make_snapshot(ap_result.snapshots[-1], scenario.config,
                                    scenario.grid)
            ex_snap = make_snapshot(ex_result.snapshots[-1], scenario.config,
                                    scenario.grid)
            for name in ("h", "u", "v", "Theta"):
                diff = l1_error(ap_snap.fields[name], ex_snap.fields[name],
                                scenario.grid)
                fh.write(f"{name} = {diff:.17g}\n")
        else:
            fh.write("# comparison incomplete: a run blew up\n")
    return max(codes)


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        opts = _merge(args)
        if args.command == "run":
            return _cmd_run(opts)
        if args.command == "convergence":
            return _cmd_convergence(opts)
        return _cmd_compare(opts)
    except (TrswError, ValueError, OSError) as exc:
        print(f"trsw: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
