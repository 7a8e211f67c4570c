"""Command-line front end.

Subcommands: spectrum, sweep, eigenfunction, operator-norms, self-adjoint,
validate. Options may also come from a JSON config file (``--config``); flags
given on the command line win. Exit status is 0 on success, 1 when a
computation fails (or a validation criterion fails) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__, acceptance, analysis, matching, operators
from .fd_inner import DEFAULT_N
from .special_fn import DomainError

FLOAT_FMT = "%.17g"


class UsageError(Exception):
    pass


def fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FMT % value
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if np.isfinite(v) else None
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def write_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], out: io.TextIOBase) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def write_json(command: str, config: dict, data: dict, out: io.TextIOBase) -> None:
    envelope = {"tool": "tfspectrum", "version": __version__, "command": command,
                "config": _json_value(config), "data": _json_value(data)}
    json.dump(envelope, out, indent=2, sort_keys=True)
    out.write("\n")


def _emit(args, header, rows, extra: dict | None = None) -> None:
    """Write a table as CSV or JSON to --out (or stdout)."""
    if args.out:
        handle = open(args.out, "w", newline="", encoding="utf-8")
    else:
        handle = sys.stdout
    try:
        if args.format == "json":
            data = {"columns": list(header), "rows": [list(r) for r in rows]}
            data.update(extra or {})
            write_json(args.command, _config_echo(args), data, handle)
        else:
            write_csv(header, rows, handle)
    finally:
        if handle is not sys.stdout:
            handle.close()


def _config_echo(args) -> dict:
    skip = {"func", "config", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _print_fit(label: str, fit: analysis.PowerFit | None, args) -> None:
    """Fit block goes to stdout when the table went to a file, else to stderr."""
    stream = sys.stdout if args.out else sys.stderr
    if fit is None:
        print(f"# {label}: fewer than 3 usable points, no fit", file=stream)
        return
    print(f"# {label}: slope={fmt(fit.slope)} intercept={fmt(fit.intercept)} "
          f"r_squared={fmt(fit.r_squared)} n_points={fit.n_points}", file=stream)


def cmd_spectrum(args) -> int:
    res = (matching.find_eigenvalue if args.tracking == "eigenvalue"
           else matching.find_inner_resonance)(args.eps, args.target, args.n_grid)
    header = ["eps", "target", "gamma", "deviation", "det_residual", "a_ratio", "c_plus", "c_minus"]
    row = [args.eps, res.target, res.gamma, res.deviation, res.det_residual,
           res.a_ratio, res.c_plus, res.c_minus]
    extra = {}
    if args.oracle:
        if args.target > 6:
            raise DomainError("the oracle covers targets 1..6")
        oracle = operators.generalized_gamma_spectrum(args.eps, k=args.target)
        header.append("oracle_gamma")
        row.append(float(oracle[args.target - 1]))
        extra["oracle_spectrum"] = [float(v) for v in oracle]
    _emit(args, header, [row], extra)
    return 0


def cmd_sweep(args) -> int:
    eps_values = analysis.log_spaced(args.eps_min, args.eps_max, args.points)
    sweep = analysis.sweep_eigenvalue(args.target, eps_values, args.n_grid, args.tracking)
    rows = [[r.eps, r.gamma, r.deviation, r.a_ratio, r.excluded] for r in sweep.rows]
    fits = {}
    for column in ("deviation", "a_ratio"):
        try:
            fits[column] = analysis.power_fit(sweep, column)
        except analysis.FitError:
            fits[column] = None
    extra = {"fit": {k: (asdict(v) if v else None) for k, v in fits.items()},
             "target_gamma": sweep.target_gamma,
             "notes": [f"eps={fmt(r.eps)}: {r.note}" for r in sweep.rows if r.note]}
    _emit(args, ["eps", "gamma", "deviation", "a_ratio", "excluded"], rows, extra)
    if args.format == "csv":
        _print_fit("deviation fit", fits["deviation"], args)
        _print_fit("a_ratio fit", fits["a_ratio"], args)
    for r in sweep.rows:
        if r.note:
            print(f"# eps={fmt(r.eps)}: {r.note}", file=sys.stderr)
    return 0


def cmd_eigenfunction(args) -> int:
    res = matching.find_eigenvalue(args.eps, args.target, args.n_grid)
    prof = matching.assemble_eigenfunction(res, x_max=args.x_max, n_exterior=args.exterior_points,
                                           normalization=args.normalization)
    extra = {"gamma": res.gamma, "w_at_one": prof.w_at_one, "jump_third": prof.jump_third}
    _emit(args, ["x", "w"], list(zip(prof.xs, prof.ws)), extra)
    return 0


def cmd_operator_norms(args) -> int:
    eps_values = analysis.log_spaced(args.eps_min, args.eps_max, args.points)
    sweep = analysis.scaling_sweep(args.kind, eps_values, args.length, args.m)
    rows = [[r.eps, r.value, r.m, r.scaled] for r in sweep.rows]
    extra = {"fit": asdict(sweep.fit) if sweep.fit else None, "errors": list(sweep.errors)}
    _emit(args, ["eps", "value", "m", "scaled"], rows, extra)
    if args.format == "csv":
        _print_fit(f"{args.kind} fit", sweep.fit, args)
    for err in sweep.errors:
        print(f"# {err}", file=sys.stderr)
    # every row refused by the resolution rule: the request itself was invalid
    return 2 if sweep.errors and not sweep.rows else 0


def cmd_self_adjoint(args) -> int:
    lam, ratio = analysis.self_adjoint_eigenvalue(args.eps, args.m)
    header = ["eps", "m", "lambda", "delta_ratio", "delta_limit"]
    row = [args.eps, args.m, lam, ratio, analysis.delta_constant() * (2 * args.m - 1)]
    _emit(args, header, [row])
    return 0


def cmd_validate(args) -> int:
    results = acceptance.run_all(args.criteria)
    for crit in results:
        print(crit.line())
        for note in crit.info:
            print(f"    info: {note}")
    failed = [c.number for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {', '.join(map(str, failed))}" if failed else ""))
    return 1 if failed else 0


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _grid(text: str) -> int:
    value = int(text)
    if value < 50:
        raise argparse.ArgumentTypeError(f"n-grid must be >= 50, got {value}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfspectrum",
        description="Spectrum of the linearized Thomas-Fermi model problem.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, table=True):
        p.add_argument("--config", type=Path, help="JSON file of option defaults (flags override)")
        if table:
            p.add_argument("--out", type=Path, help="output file (default: stdout)")
            p.add_argument("--format", choices=["csv", "json"], default="csv",
                           help="output format (default: csv)")

    def tracking(p):
        p.add_argument("--tracking", choices=["eigenvalue", "resonance"], default="eigenvalue",
                       help="root of the regularized determinant (eigenvalue, default) or the "
                            "sign change of the raw determinant (inner resonance)")

    p = sub.add_parser("spectrum", help="locate one eigenvalue by matching")
    p.add_argument("--eps", type=_positive, default=1e-4, help="default: 1e-4")
    p.add_argument("--target", type=_count, default=1, help="odd mode index n (default: 1)")
    p.add_argument("--n-grid", type=_grid, default=DEFAULT_N, help=f"default: {DEFAULT_N}")
    p.add_argument("--oracle", action="store_true", help="also run the Cholesky-pencil oracle")
    tracking(p)
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="eigenvalue deviation vs eps with power fits")
    p.add_argument("--target", type=_count, default=1, help="default: 1")
    p.add_argument("--eps-min", type=_positive, default=1e-6, help="default: 1e-6")
    p.add_argument("--eps-max", type=_positive, default=1e-4, help="default: 1e-4")
    p.add_argument("--points", type=_count, default=20, help="log-spaced count (default: 20)")
    p.add_argument("--n-grid", type=_grid, default=DEFAULT_N, help=f"default: {DEFAULT_N}")
    tracking(p)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eigenfunction", help="sample the even eigenfunction")
    p.add_argument("--eps", type=_positive, default=1e-4, help="default: 1e-4")
    p.add_argument("--target", type=_count, default=1, help="default: 1")
    p.add_argument("--n-grid", type=_grid, default=DEFAULT_N, help=f"default: {DEFAULT_N}")
    p.add_argument("--x-max", type=_positive, default=1.5, help="default: 1.5")
    p.add_argument("--exterior-points", type=_count, default=400, help="default: 400")
    p.add_argument("--normalization", choices=["sup_one", "l2_one"], default="sup_one",
                   help="default: sup_one")
    common(p)
    p.set_defaults(func=cmd_eigenfunction)

    p = sub.add_parser("operator-norms", help="lambda1 / resolvent-norm scaling in eps")
    p.add_argument("--kind", choices=[k.value for k in analysis.ScalingKind],
                   default="lambda1_plus", help="default: lambda1_plus")
    p.add_argument("--eps-min", type=_positive, default=1e-4, help="default: 1e-4")
    p.add_argument("--eps-max", type=_positive, default=1e-2, help="default: 1e-2")
    p.add_argument("--points", type=_count, default=5, help="default: 5")
    p.add_argument("--length", type=_positive, default=operators.DEFAULT_L,
                   help=f"truncation half-length L (default: {operators.DEFAULT_L})")
    p.add_argument("--m", type=int, default=None,
                   help="interior grid points (default: smallest m with h <= eps^(2/3)/10)")
    common(p)
    p.set_defaults(func=cmd_operator_norms)

    p = sub.add_parser("self-adjoint", help="even eigenvalue of L- from the matching condition")
    p.add_argument("--eps", type=_positive, default=1e-5, help="default: 1e-5")
    p.add_argument("--m", type=_count, default=1, help="even-mode index (default: 1)")
    common(p)
    p.set_defaults(func=cmd_self_adjoint)

    parser.subcommands = sub.choices
    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--criteria", type=int, nargs="*", choices=sorted(acceptance.CRITERIA),
                   help="subset to run (default: all)")
    common(p, table=False)
    p.set_defaults(func=cmd_validate)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"config {args.config} must hold a JSON object")
    known = vars(args)
    defaults = {}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("command", "func", "config"):
            raise UsageError(f"config {args.config}: unknown option {key!r} for {args.command}")
        defaults[dest] = value
    # re-parse so explicit flags override config values
    parser.subcommands[args.command].set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tfspectrum: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "eps_min", None) and args.eps_min > args.eps_max:
        print("tfspectrum: error: --eps-min exceeds --eps-max", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (DomainError, operators.ResolutionError) as exc:
        print(f"tfspectrum: error: {exc}", file=sys.stderr)
        return 2
    except (matching.EigenvalueNotFound, ArithmeticError, RuntimeError, analysis.FitError) as exc:
        print(f"tfspectrum: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
