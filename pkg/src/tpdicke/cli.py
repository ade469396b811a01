"""Command-line front end.

Every frequency and rate is given in the same (arbitrary) unit and rescaled so
that omega_c = 1 on ingestion; all outputs are therefore in units of omega_c.
Axis ranges and bisection brackets are read directly in omega_c units.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dynamics, oracle, plotting, steady, sweep
from .model import PARAM_NAMES, SCAN_NAMES, DickeError, load_config, params_from_mapping, threshold_coupling
from .stability import classify

UNIT_NOTE = "Frequencies and rates share one unit; everything is rescaled to omega_c = 1."
PARAM_HELP = {
    "omega_c": "boson frequency (rad/time, > 0)",
    "omega_0": "qubit frequency (rad/time, > 0)",
    "g": "two-photon coupling (rad/time, >= 0)",
    "n_qubits": "number of qubits N (positive integer)",
    "kappa": "photon loss rate (1/time, >= 0)",
    "gamma_down": "individual qubit decay rate (1/time, >= 0)",
    "gamma_phi": "individual qubit dephasing rate (1/time, >= 0)",
}
DEFAULT_BRACKETS = {
    "g": (1e-3, 10.0),
    "gamma": (0.5, 3.0),
    "gamma_down": (0.05, 5.0),
    "gamma_phi": (0.05, 5.0),
    "omega_0": (0.1, 5.0),
    "kappa": (0.05, 5.0),
}


class UsageError(Exception):
    pass


def _param_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("model parameters", UNIT_NOTE)
    group.add_argument("--config", metavar="PATH", help="key = value parameter file; flags override it")
    for name in PARAM_NAMES:
        kind = int if name == "n_qubits" else float
        group.add_argument("--" + name.replace("_", "-"), dest=name, type=kind, help=PARAM_HELP[name])
    return parent


def _params(args, scanned: tuple[str, ...] = (), placeholder: float = 1.0):
    values = load_config(args.config) if args.config else {}
    values.update({k: getattr(args, k) for k in PARAM_NAMES if getattr(args, k) is not None})
    optional = set(scanned)
    if "gamma" in optional:
        optional |= {"gamma_down", "gamma_phi"}
    for name in optional:
        values.setdefault(name, placeholder)
    missing = [k for k in PARAM_NAMES if k not in values]
    if missing:
        raise UsageError("missing required parameter(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return params_from_mapping(values)


def _emit_csv(write, obj, out):
    if out:
        write(obj, out)
    else:
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "out.csv"
            write(obj, path)
            sys.stdout.write(path.read_text())


def cmd_trajectory(args) -> int:
    params = _params(args)
    if args.state:
        start = np.array([float(s) for s in args.state.split(",")])
        if start.shape != (6,):
            raise UsageError("--state needs six comma-separated numbers")
    elif args.start == "normal":
        start = steady.normal_branch(params).state.as_array()
    else:
        sol = steady.superradiant_branches(params)
        if not sol.branches:
            raise DickeError(f"no superradiant branch: {sol.reason}")
        start = sol.branches[0 if args.start == "plus" else 1].state.as_array()
    if args.perturb:
        start = start + args.perturb * np.random.default_rng(args.seed).standard_normal(6)
    traj = dynamics.integrate(start, params, args.t_max, args.rtol, args.atol)
    print(f"outcome: {traj.outcome.value} at t={traj.times[-1]:.6g}", file=sys.stderr)
    _emit_csv(dynamics.write_trajectory_csv, traj, args.out)
    return 0


def cmd_steady(args) -> int:
    params = _params(args)
    branches = [steady.normal_branch(params)]
    sol = steady.superradiant_branches(params, lower_root=args.lower_root)
    branches += list(sol.branches) + list(sol.lower_root)
    if sol.reason:
        print(f"no superradiant branch: {sol.reason}", file=sys.stderr)
    header = ["label", *dynamics.STATE_FIELDS, "physical", "residual"]
    print(",".join(header))
    for b in branches:
        rec = b.to_record(params)
        row = [rec["label"]] + [f"{rec[k]:.17g}" for k in dynamics.STATE_FIELDS]
        row += [str(rec["physical"]).lower(), f"{rec['residual']:.17g}"]
        print(",".join(row))
    return 0


def cmd_classify(args) -> int:
    params = _params(args)
    c = classify(params, margin=args.margin)
    if args.json:
        rec = {
            "label": c.label.value,
            "normal": c.normal.to_record(),
            "superradiant": c.superradiant.to_record() if c.superradiant else None,
            "n_ss": None if np.isnan(c.n_ss) else c.n_ss,
            "reason": c.branches.reason,
        }
        print(json.dumps(rec, indent=2))
    else:
        print(c.label.value)
    return 0


def cmd_photon_curve(args) -> int:
    params = _params(args, scanned=("g",))
    curve = sweep.photon_curve(params, (args.g_min, args.g_max), args.points, log=args.log)
    _emit_csv(sweep.write_csv, curve, args.out)
    if args.figure:
        plotting.render_photon_curve({f"N={params.n_qubits}": curve}, args.figure, threshold_coupling(params))
    return 0


def cmd_phase_diagram(args) -> int:
    try:
        ax1 = sweep.Axis.parse(args.axis1, log=args.log1)
        ax2 = sweep.Axis.parse(args.axis2, log=args.log2)
        params = _params(args, scanned=(ax1.name, ax2.name), placeholder=max(ax1.lo, 1e-3))
        config = sweep.SweepConfig(params, ax1, ax2, margin=args.margin)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    diagram = sweep.grid_sweep(config, workers=args.workers)
    for (i, j), msg in sorted(diagram.errors.items()):
        print(f"cell ({i}, {j}) failed: {msg}", file=sys.stderr)
    _emit_csv(sweep.write_csv, diagram, args.out)
    if args.svg:
        plotting.render_svg(diagram, args.svg)
    return 0


def cmd_threshold(args) -> int:
    bracket = tuple(args.bracket) if args.bracket else DEFAULT_BRACKETS.get(args.scan)
    if bracket is None:
        raise UsageError(f"--bracket is required when scanning {args.scan}")
    params = _params(args, scanned=(args.scan,), placeholder=bracket[0])
    result = sweep.threshold_scan(params, args.scan, bracket, args.predicate, tol=args.tol)
    print(f"{result.value:.10g}")
    print(f"bracket [{result.lo:.10g}, {result.hi:.10g}], crossing: {result.crossing}", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    params = _params(args)
    checks = oracle.run_suite(params, args.cutoff, n_samples=args.samples, seed=args.seed)
    for check in checks:
        print(check.line())
    return 0 if all(c.passed for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    parent = _param_parent()
    parser = argparse.ArgumentParser(prog="tpdicke", description="Mean-field laboratory for the dissipative two-photon Dicke model. " + UNIT_NOTE)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("trajectory", parents=[parent], help="integrate the mean-field equations")
    p.add_argument("--t-max", type=float, default=1000.0, help="final time (1/omega_c)")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--atol", type=float, default=1e-10)
    p.add_argument("--start", choices=("normal", "plus", "minus"), default="normal", help="fixed point to start from")
    p.add_argument("--state", help="explicit start x,v,n,jx,jy,jz (overrides --start)")
    p.add_argument("--perturb", type=float, default=0.0, help="Gaussian kick of this size added to the start")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("steady", parents=[parent], help="list steady-state branches")
    p.add_argument("--lower-root", action="store_true", help="also report the diagnostic lower jz root")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("classify", parents=[parent], help="print the phase label N, S, B or I")
    p.add_argument("--margin", type=float, default=1e-9, help="stability margin on eigenvalue real parts (omega_c)")
    p.add_argument("--json", action="store_true", help="print both stability reports as JSON")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("photon-curve", parents=[parent], help="superradiant photon number versus g")
    p.add_argument("--g-min", type=float, required=True, help="lowest coupling (omega_c)")
    p.add_argument("--g-max", type=float, required=True, help="highest coupling (omega_c)")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--log", action="store_true", help="log-spaced couplings")
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--figure", help="also render a figure to this path (.svg, .png, .pdf)")
    p.set_defaults(func=cmd_photon_curve)

    p = sub.add_parser("phase-diagram", parents=[parent], help="classify a two-parameter grid")
    p.add_argument("--axis1", required=True, help="name:min:max:count, e.g. g:0.1:10:80 (omega_c units)")
    p.add_argument("--axis2", required=True, help="name:min:max:count; 'gamma' locks gamma_down = gamma_phi")
    p.add_argument("--log1", action="store_true", help="log spacing on axis1")
    p.add_argument("--log2", action="store_true", help="log spacing on axis2")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: all CPUs)")
    p.add_argument("--margin", type=float, default=1e-9)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--svg", help="heatmap output path")
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("threshold", parents=[parent], help="bisect a parameter for a stability change")
    p.add_argument("--scan", required=True, choices=SCAN_NAMES, help="parameter to scan; 'gamma' locks the two qubit rates")
    p.add_argument("--predicate", required=True, choices=sorted(sweep.PREDICATES))
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"), help="scan interval (omega_c units)")
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("oracle", parents=[parent], help="exact small-system Lindblad checks")
    p.add_argument("--cutoff", type=int, required=True, help="Fock-space truncation n_ph")
    p.add_argument("--samples", type=int, default=5, help="random states per check")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DickeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
