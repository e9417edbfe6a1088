"""``darkhole`` command line.

Exit codes: 0 on success, 1 on any error, 2 when a spectrum contains points
whose time average did not converge (files are still written).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analysis, crosscheck, dynamics, model, spectra
from .errors import DarkholeError
from .liouvillian import build_liouvillian
from .steadystate import steady_state_nullspace

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [[_jsonable(complex(z)) for z in row] for row in value]
        return value.tolist()
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, model.ModelKind):
        return value.value
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit_json(payload):
    print(json.dumps(_jsonable(payload), indent=2, sort_keys=True))


def _params_dict(p):
    return {key: getattr(p, key) for key in model.PARAM_KEYS}


# --- configuration ----------------------------------------------------------

def load_config(args):
    if getattr(args, "config", None) and getattr(args, "preset", None):
        raise DarkholeError("CONFIG", "give either a config file or --preset, not both")
    if getattr(args, "config", None):
        try:
            params = model.load_params(args.config)
        except OSError as exc:
            raise DarkholeError("IO_ERROR", str(exc)) from None
    elif getattr(args, "preset", None):
        params = model.scenario_preset(args.preset).params
    else:
        raise DarkholeError("CONFIG", "no parameters: pass a config file or --preset NAME")
    changes = {}
    for item in getattr(args, "set", None) or ():
        if "=" not in item:
            raise DarkholeError("PARSE_ERROR", f"--set expects key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in model.PARAM_KEYS:
            raise DarkholeError("PARSE_ERROR", f"--set: unknown key {key!r}")
        try:
            changes[key] = model.coerce_value(key, value)
        except ValueError as exc:
            raise DarkholeError("PARSE_ERROR", f"--set {key}: {exc}") from None
    if changes:
        params = params.replace(**changes)
    return model.validate_params(params)


def resolve_threads(args):
    if getattr(args, "threads", None):
        return args.threads
    return spectra.default_threads()


def read_matrix_file(path):
    """Three rows of three complex entries (``1+0i`` or ``1+0j``)."""
    try:
        with open(path) as fh:
            lines = [ln.split("#", 1)[0].strip() for ln in fh]
    except OSError as exc:
        raise DarkholeError("IO_ERROR", str(exc)) from None
    rows = [ln.replace(",", " ").split() for ln in lines if ln]
    try:
        rho = np.array([[model.parse_complex(x) for x in row] for row in rows], dtype=complex)
    except ValueError as exc:
        raise DarkholeError("INVALID_INITIAL_STATE", f"{path}: {exc}") from None
    if rho.shape != (3, 3):
        raise DarkholeError("INVALID_INITIAL_STATE", f"{path}: need a 3x3 matrix")
    return rho


def initial_state(spec, params):
    if spec == "mixed":
        return model.mixed_state()
    if spec == "ground":
        if params.model_kind is model.ModelKind.V_ONE_ELECTRON:
            return model.projector(2)
        return 0.5 * (model.projector(model.A) + model.projector(model.B))
    if spec == "C":
        return model.projector(model.C)
    if spec == "D":
        dark, _ = analysis.dark_bright_basis(
            params.rabi_alpha, params.rabi_beta,
            one_electron=params.model_kind is model.ModelKind.V_ONE_ELECTRON)
        return dark.density_matrix()
    return read_matrix_file(spec)


# --- commands -----------------------------------------------------------------

def cmd_preset(args):
    if args.action == "list":
        presets = [model.scenario_preset(name) for name in model.PRESET_NAMES]
        if args.json:
            _emit_json({"presets": [{"name": p.name, "description": p.description} for p in presets]})
        else:
            width = max(len(p.name) for p in presets)
            for p in presets:
                print(f"{p.name:<{width}}  {p.description}")
        return EXIT_OK
    if not args.name:
        raise DarkholeError("UNKNOWN_PRESET", "preset show needs a name")
    preset = model.scenario_preset(args.name)
    if args.json:
        _emit_json({
            "name": preset.name,
            "description": preset.description,
            "params": _params_dict(preset.params),
            "expected_features": [vars(f) for f in preset.expected_features],
        })
    else:
        print(f"# {preset.name}: {preset.description}")
        print(model.format_params(preset.params), end="")
    return EXIT_OK


def cmd_spectrum(args):
    params = load_config(args)
    grid = spectra.parse_grid(args.grid)
    policy = dynamics.IntegrationPolicy(step=args.step)
    scan = spectra.scan_detuning(params, grid, policy, threads=resolve_threads(args),
                                 prominence=args.prominence)
    csv_path, dips_path = spectra.export_csv(scan, args.out)
    if args.plot_script:
        spectra.write_gnuplot_script(args.plot_script, csv_path, scan.dips)
    failed = scan.not_converged
    if args.json:
        _emit_json({
            "spectrum_csv": csv_path,
            "dips_csv": dips_path,
            "points": len(scan.points),
            "not_converged": [p.delta_alpha for p in failed],
            "dips": [vars(d) for d in scan.dips],
        })
    else:
        print(f"wrote {csv_path} ({len(scan.points)} points) and {dips_path}")
        if scan.dips:
            print(f"{'position':>12} {'depth':>12} {'half_width':>12}  classification")
            for d in scan.dips:
                print(f"{d.position:12.5f} {d.depth:12.4e} {d.half_width:12.4e}  {d.classification}")
        else:
            print("NO_DIPS")
        if failed:
            print(f"NOT_CONVERGED at {len(failed)} point(s)", file=sys.stderr)
    return EXIT_NOT_CONVERGED if failed else EXIT_OK


def cmd_evolve(args):
    params = load_config(args)
    rho0 = initial_state(args.rho0, params)
    model.check_density_matrix(rho0, code="INVALID_INITIAL_STATE")
    policy = dynamics.IntegrationPolicy(method=args.method, step=args.step, tolerance=args.tolerance,
                                        max_time=args.tmax, record_stride=args.stride)
    traj = dynamics.integrate(rho0, build_liouvillian(params), policy)
    traj.export_csv(args.out)
    final = traj.observables[-1]
    summary = {
        "trajectory_csv": os.fspath(args.out),
        "records": len(traj.times),
        "trace_drift": traj.trace_drift(),
        "min_eigenvalue": traj.min_eigenvalue(),
        "final": dict(zip(dynamics.OBSERVABLES, final)),
    }
    if args.json:
        _emit_json(summary)
    else:
        print(f"wrote {args.out} ({len(traj.times)} records, t_max = {traj.times[-1]:.6g})")
        for name, value in summary["final"].items():
            print(f"  {name:<10} {value: .10e}")
    return EXIT_OK


def cmd_steady(args):
    params = load_config(args)
    L = build_liouvillian(params)
    if L.autonomous:
        result = steady_state_nullspace(L)
        payload = {"method": "nullspace", "status": result.status, "null_dim": result.null_dim,
                   "residual": result.residual}
        rho = result.rho
        if result.degenerate:
            payload["basis"] = list(result.basis)
    else:
        point = spectra.solve_point(params, dynamics.IntegrationPolicy(step=args.step))
        payload = {"method": point.method_label, "status": "TIME_AVERAGED", "residual": point.residual}
        rho = point.rho
    if rho is not None:
        payload["rho"] = rho
        if params.model_kind.two_electron:
            payload["hole"] = vars(analysis.hole_population(rho, params.model_kind))
    if args.json:
        _emit_json(payload)
    else:
        print(f"method: {payload['method']}  status: {payload['status']}")
        if rho is None:
            print(f"steady manifold has dimension {payload['null_dim']}")
        else:
            with np.printoptions(precision=8, suppress=True):
                print(rho)
        if "hole" in payload:
            h = payload["hole"]
            print(f"hole: a {h['p_hole_a']:.6f}  b {h['p_hole_b']:.6f}  c {h['p_hole_c']:.6f}")
    return EXIT_OK


def cmd_compare(args):
    params = load_config(args)
    if params.rabi_alpha == 0 or params.rabi_beta == 0:
        print("DEGENERATE: both Rabi frequencies must be nonzero for a unique dark state", file=sys.stderr)
    report = analysis.compare_v_lambda(params)
    if args.json:
        hole = vars(report.hole) if report.hole else None
        _emit_json({"F_V": report.fluorescence_v, "F_Lambda": report.fluorescence_lambda,
                    "ratio": report.trapping_ratio, "lambda_degenerate": report.lambda_degenerate,
                    "hole": hole})
    elif args.csv:
        print(",".join(analysis.TrappingReport.CSV_HEADER))
        print(report.csv_row(), end="")
    else:
        print(report.render())
    return EXIT_OK


def cmd_crosscheck(args):
    params = load_config(args)
    summary = crosscheck.crosscheck_samples(params, args.samples, seed=args.seed)
    if args.json:
        _emit_json({
            "samples": summary.samples,
            "max_per_equation": summary.max_per_equation,
            "localized": summary.localized,
            "suspect_terms": [vars(s) for s in summary.suspect_terms],
        })
        return EXIT_OK
    if summary.samples == 0:
        print("no samples")
        return EXIT_OK
    print(f"{summary.samples} random states; max |printed - derived| per equation:")
    for name, value in summary.max_per_equation.items():
        print(f"  d{name}/dt  {value:.3e}")
    print("suspected printed terms:")
    for s in summary.suspect_terms:
        print(f"  {s.label}: printed {s.printed!r}, derived {s.derived!r}, "
              f"max contribution {s.contribution:.3e}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def _add_config(p):
    p.add_argument("config", nargs="?", help="parameter file (key = value)")
    p.add_argument("--preset", help="start from a named preset instead of a file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one parameter; applied after loading, last wins")
    p.add_argument("--json", action="store_true", help="print a JSON summary")


def build_parser():
    parser = argparse.ArgumentParser(prog="darkhole", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="list or show scenario presets")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("spectrum", help="scan detuning_alpha and detect dark resonances")
    _add_config(p)
    p.add_argument("--grid", default="-1:1:401", help="min:max:points (default -1:1:401)")
    p.add_argument("--out", default="spectrum.csv")
    p.add_argument("--plot-script", help="also write a gnuplot script here")
    p.add_argument("--prominence", type=float, default=None,
                   help="minimum dip prominence (default 2%% of the largest |Im rho_AC|)")
    p.add_argument("--step", type=float, default=0.05, help="RK4 step for time-averaged points")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("evolve", help="integrate the master equation")
    _add_config(p)
    p.add_argument("--rho0", default="mixed", help="mixed, ground, C, D or a 3x3 matrix file")
    p.add_argument("--tmax", type=float, default=100.0)
    p.add_argument("--out", default="trajectory.csv")
    p.add_argument("--method", choices=(dynamics.RK4_FIXED, dynamics.RK45_ADAPTIVE), default=dynamics.RK4_FIXED)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("steady", help="steady (or period-averaged) state")
    _add_config(p)
    p.add_argument("--step", type=float, default=0.05)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("compare", help="V versus Lambda fluorescence on Raman resonance")
    _add_config(p)
    p.add_argument("--csv", action="store_true", help="print the report as a CSV row")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("crosscheck", help="published equations versus derived generator")
    _add_config(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_crosscheck)
    return parser


def _glue_values(argv):
    # "--grid -1:1:401" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for arg in it:
        if arg in ("--grid", "--set"):
            value = next(it, None)
            out.append(arg if value is None else f"{arg}={value}")
        else:
            out.append(arg)
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_glue_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except DarkholeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
