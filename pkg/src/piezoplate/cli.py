"""Command-line entry point.

Exit status: 0 success, 2 configuration error, 3 precondition violation,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import config_io
from .coupling import QuadratureConvergenceError, coupling_report
from .dynamics import DimensionError, SingularResponseError
from .integrator import StepSizeUnderflow
from .modal_basis import MEMBRANE, build_basis, stiffening_ratio
from .params import ParameterError, derived_report
from .scenario import (
    BOUNDARIES,
    TUNE_COLUMNS,
    Scenario,
    ScenarioError,
    build_system,
    load_scenario,
    run,
    tune_report,
)
from .tuning import BranchTrackingError, RootSolverError, TuningError, damping_sweep

log = logging.getLogger("piezoplate")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4

_NUMERICAL = (
    StepSizeUnderflow,
    SingularResponseError,
    RootSolverError,
    BranchTrackingError,
    QuadratureConvergenceError,
    FloatingPointError,
    ArithmeticError,
)
_PRECONDITION = (ScenarioError, ParameterError, TuningError, DimensionError, ValueError, IndexError)


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--quad-order", type=int, default=default, help="Gauss-Legendre points per axis")
    parser.add_argument("--rtol", type=float, default=default, help="integrator relative tolerance")
    parser.add_argument(
        "--out", default=default, help=f"output root (overrides ${config_io.OUTPUT_ROOT_ENV} and the config)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="piezoplate", description="Modal simulation and impedance tuning of piezo-networked plates."
    )
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("params", "print the derived-parameter report")
    p.add_argument("config", nargs="?")

    p = add("modes", "eigenvalue table and mode-shape grids")
    p.add_argument("--boundary", choices=sorted(BOUNDARIES), default="clamped")
    p.add_argument("--count", type=int, default=9)
    p.add_argument("--grid", type=int, default=0, help="export mode shapes on a grid of this many points per side")

    p = add("coupling", "coupling matrix and coupled-pair report")
    p.add_argument("--boundary", choices=sorted(BOUNDARIES), default="clamped")
    p.add_argument("--count", type=int, default=9)
    p.add_argument("--tol", type=float, default=1e-6)

    p = add("tune", "optimal impedance per mode")
    p.add_argument("config", nargs="?")
    p.add_argument("--boundary", choices=sorted(BOUNDARIES))
    p.add_argument("--count", type=int)
    p.add_argument("--root-locus", type=int, metavar="H", help="also export the damping sweep of mode H")

    p = add("simulate", "run one or more scenario files")
    p.add_argument("configs", nargs="+")
    p.add_argument("--jobs", type=int, default=1)

    p = add("frf", "frequency response of a scenario")
    p.add_argument("config")
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--omega-points", type=int)

    p = add("impulse", "impulse response of a scenario")
    p.add_argument("config")
    p.add_argument("--point", help="impulse location 'x1,x2'")
    return parser


# --- commands ------------------------------------------------------------------------


def _scenario(args, config=None, **overrides) -> Scenario:
    overrides.update(quad_order=args.quad_order, rel_tol=args.rtol)
    if config is None:
        return Scenario(**{k: v for k, v in overrides.items() if v is not None})
    return load_scenario(config, **overrides)


def _table(header, rows) -> str:
    return config_io.csv_text(header, rows)


def cmd_params(args) -> int:
    s = _scenario(args, args.config)
    sys.stdout.write(config_io.json_text(derived_report(s.base_params())))
    return EXIT_OK


def cmd_modes(args) -> int:
    order = args.quad_order or Scenario.quad_order
    kind = BOUNDARIES[args.boundary]
    if args.count < 0:
        raise ScenarioError("count must be non-negative")
    mech = build_basis(kind, args.count, order)
    elec = build_basis(MEMBRANE, args.count, order)
    header = ["k", "i", "j", "lambda", "lambda_over_pi4", "nu", "nu_over_pi2", "c_k"]
    rows = []
    for m, e in zip(mech.modes, elec.modes):
        c = stiffening_ratio(m.index, order) if args.boundary == "clamped" else 1.0
        rows.append([m.index.k, m.index.i, m.index.j, m.eigenvalue, m.eigenvalue / math.pi**4, e.eigenvalue, e.eigenvalue / math.pi**2, c])
    root = config_io.resolve_output_root(args.out)
    with config_io.staged_output(root / f"modes-{args.boundary}") as out:
        out.csv("modes.csv", header, rows)
        if args.grid:
            for m in mech.modes:
                out.csv(f"mode_{m.index.k}.csv", *config_io.shape_table(m.shape, args.grid))
    sys.stdout.write(_table(header, rows))
    return EXIT_OK


def cmd_coupling(args) -> int:
    s = _scenario(args, boundary=args.boundary, modes=args.count)
    asm = build_system(s)
    report = coupling_report(asm.coupling, args.tol)
    root = config_io.resolve_output_root(args.out)
    with config_io.staged_output(root / f"coupling-{args.boundary}") as out:
        out.csv("coupling.csv", *config_io.matrix_table(asm.coupling.entries))
        out.text("coupling_report.txt", report)
    sys.stdout.write(report)
    return EXIT_OK


def cmd_tune(args) -> int:
    s = _scenario(args, args.config, boundary=args.boundary, modes=args.count)
    rows = tune_report(s)
    root = config_io.resolve_output_root(args.out, s.output_dir)
    with config_io.staged_output(root / s.name) as out:
        out.csv("tune.csv", TUNE_COLUMNS, rows)
        if args.root_locus:
            h = args.root_locus
            asm = build_system(Scenario(**{**_plain_fields(s), "tune_mode": h, "modes": max(h, s.modes)}))
            A, B, C, _ = asm.system.modal_abcd(h)
            grid = np.abs(C) * np.geomspace(1e-2, 1e2, 801)
            sweep = damping_sweep(A, B, abs(C), grid)
            out.csv("root_locus.csv", *config_io.root_locus_table(sweep, abs(C)))
    sys.stdout.write(_table(TUNE_COLUMNS, rows))
    return EXIT_OK


def _plain_fields(s: Scenario) -> dict:
    return {f: getattr(s, f) for f in s.__dataclass_fields__}


def _run_one(config, out, quad_order, rtol, overrides=None) -> str:
    s = load_scenario(config, quad_order=quad_order, rel_tol=rtol, **(overrides or {}))
    result = run(s, out)
    return str(result.directory)


def cmd_simulate(args) -> int:
    if args.jobs > 1 and len(args.configs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_one, c, args.out, args.quad_order, args.rtol) for c in args.configs]
            dirs = [f.result() for f in futures]
    else:
        dirs = [_run_one(c, args.out, args.quad_order, args.rtol) for c in args.configs]
    for d in dirs:
        print(d)
    return EXIT_OK


def cmd_frf(args) -> int:
    overrides = {
        "experiment": "frf",
        "omega_min": args.omega_min,
        "omega_max": args.omega_max,
        "omega_points": args.omega_points,
    }
    print(_run_one(args.config, args.out, args.quad_order, args.rtol, overrides))
    return EXIT_OK


def cmd_impulse(args) -> int:
    overrides = {"experiment": "impulse"}
    if args.point:
        try:
            x1, x2 = (float(c) for c in args.point.split(","))
        except ValueError as exc:
            raise config_io.ConfigError(f"--point expects 'x1,x2', got {args.point!r}") from exc
        overrides["point"] = (x1, x2)
    print(_run_one(args.config, args.out, args.quad_order, args.rtol, overrides))
    return EXIT_OK


COMMANDS = {
    "params": cmd_params,
    "modes": cmd_modes,
    "coupling": cmd_coupling,
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "frf": cmd_frf,
    "impulse": cmd_impulse,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except config_io.ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except _NUMERICAL as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except _PRECONDITION as exc:
        log.error("precondition violated: %s", exc)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
