"""Command-line driver: single runs, refinement sweeps, and reference checks.

Exit codes: 0 success, 1 validation problem or missing reference, 2 hard
reference-comparison failure.  A flat key=value config file can stand in for
flags; explicit flags win.  The sweep worker count comes from the
HYPSTAB_WORKERS environment variable (default: all cores) and never affects
the computed values.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import _kernels
from .experiments import (
    DEFAULT_DX,
    DEFAULT_SIGMA,
    TableRow,
    emit_csv,
    run_experiment,
    table,
)
from .problems import EXAMPLE_IDS, make_example
from .references import MissingReferenceError, compare_row
from .state import BlowUpError
from .lyapunov import InadmissibleGainError


def _parse_dx(text: str) -> float:
    """Accept 0.01 or 1/100."""
    return float(Fraction(text))


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {raw.rstrip()}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _merged(args, parser) -> argparse.Namespace:
    if getattr(args, "config", None):
        file_vals = _read_config_file(args.config)
        casts = {"example": int, "dx": _parse_dx, "sigma": float, "cfl": float,
                 "T": float, "K": int, "scheme": str, "out": str}
        for key, val in file_vals.items():
            if key not in casts:
                raise ValueError(f"unknown config key {key!r}")
            if parser.get_default(key) == getattr(args, key, None):
                setattr(args, key, casts[key](val))
    return args


def _build_config(args):
    overrides = {}
    if args.scheme:
        overrides["scheme"] = args.scheme
    if args.cfl is not None:
        overrides["cfl"] = args.cfl
    if args.T is not None:
        overrides["T"] = args.T
    return make_example(args.example, sigma=args.sigma, dx=args.dx,
                        K=args.K, **overrides)


def cmd_run(args, parser) -> int:
    args = _merged(args, parser)
    config = _build_config(args)
    row, traj = run_experiment(config)
    dest = args.out if args.out else sys.stdout
    emit_csv([row], dest)
    for flag in row.flags:
        print(f"note: {flag}", file=sys.stderr)
    return 0


def cmd_table(args, parser) -> int:
    args = _merged(args, parser)
    dx_list = tuple(args.dx) if args.dx else DEFAULT_DX
    sigma_list = tuple(args.sigma) if args.sigma else DEFAULT_SIGMA
    overrides = {}
    if args.scheme:
        overrides["scheme"] = args.scheme
    rows = table(args.example, dx_list, sigma_list, K=args.K, **overrides)
    dest = args.out if args.out else sys.stdout
    emit_csv(rows, dest)
    return 0


def cmd_check(args, parser) -> int:
    examples = args.example if args.example else list(EXAMPLE_IDS)
    dx_list = tuple(args.dx) if args.dx else DEFAULT_DX
    sigma_list = tuple(args.sigma) if args.sigma else DEFAULT_SIGMA
    lines = []
    hard_fail = False
    for ex in examples:
        rows = table(ex, dx_list, sigma_list)
        for row in rows:
            try:
                comparisons = compare_row(row)
            except MissingReferenceError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 1
            for comp in comparisons:
                lines.append(comp.line())
                if comp.hard and not comp.passed:
                    hard_fail = True
    report = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    return 2 if hard_fail else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypstab",
        description="Finite-volume boundary-feedback stabilization laboratory "
                    f"(kernel backend: {_kernels.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment, emit a CSV row")
    run_p.add_argument("--example", type=int, required=False, default=1)
    run_p.add_argument("--dx", type=_parse_dx, default=0.01)
    run_p.add_argument("--sigma", type=float, default=0.5)
    run_p.add_argument("--scheme", choices=["upwind", "cu"], default=None)
    run_p.add_argument("--cfl", type=float, default=None)
    run_p.add_argument("--T", type=float, default=None)
    run_p.add_argument("--K", type=int, default=100)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--config", default=None,
                       help="flat key=value file; flags override it")
    run_p.set_defaults(func=cmd_run)

    tab_p = sub.add_parser("table", help="refinement sweep, CSV in row order")
    tab_p.add_argument("--example", type=int, required=True)
    tab_p.add_argument("--dx", type=_parse_dx, action="append", default=None)
    tab_p.add_argument("--sigma", type=float, action="append", default=None)
    tab_p.add_argument("--scheme", choices=["upwind", "cu"], default=None)
    tab_p.add_argument("--K", type=int, default=100)
    tab_p.add_argument("--out", default=None)
    tab_p.add_argument("--config", default=None)
    tab_p.set_defaults(func=cmd_table)

    chk_p = sub.add_parser("check", help="compare fresh runs against embedded references")
    chk_p.add_argument("--example", type=int, action="append", default=None)
    chk_p.add_argument("--dx", type=_parse_dx, action="append", default=None)
    chk_p.add_argument("--sigma", type=float, action="append", default=None)
    chk_p.add_argument("--report", default=None)
    chk_p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, InadmissibleGainError, BlowUpError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
