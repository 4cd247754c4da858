"""Command-line front end: ``qdeleter {evolve,figure,sweep,check}``.

Exit codes: 0 on success (or a passing check), 1 for invalid arguments,
2 for numerical failure or a failing check.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import re
import sys
from typing import Sequence

from qdeleter.errors import InvalidArgument, NumericalFailure
from qdeleter.experiments import (
    FIGURE_DEFAULTS,
    FIGURES,
    STATE_COLUMNS,
    SWEEP_AXES,
    ConfigError,
    RunConfig,
    check_report,
    evolve_rows,
    figure_csv,
    figure_dataset,
    header_lines,
    sweep_rows,
    write_csv,
)
from qdeleter.qnd import BUILTIN_KERNELS

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2

_PI_EXPR = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Parse a float or a multiple of pi such as ``pi``, ``pi/4`` or ``3*pi/8``."""
    m = _PI_EXPR.match(text)
    if m:
        coeff = m.group(1)
        value = (float(coeff) if coeff not in (None, "", "+", "-") else (-1.0 if coeff == "-" else 1.0)) * math.pi
        if m.group(2):
            value /= float(m.group(2))
        return value
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or multiple of pi: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    # defaults are None so that config-file values are only overridden by explicit flags
    p.add_argument("--config", metavar="PATH", help="flat JSON object with keys mirroring the flags")
    p.add_argument("--channel", choices=("dissipative", "qnd"))
    p.add_argument("--gamma0", type=float, help="coupling strength")
    p.add_argument("--omega", type=float, help="qubit frequency")
    p.add_argument("--temp", type=float, help="bath temperature (hbar = k_B = 1)")
    p.add_argument("--squeeze-r", dest="squeeze_r", type=float, help="squeezing magnitude r")
    p.add_argument("--squeeze-phi", dest="squeeze_phi", type=parse_angle, help="squeezing phase (radians)")
    p.add_argument("--theta0", type=parse_angle, help="initial polar angle, e.g. 0, pi/4, pi")
    p.add_argument("--phi0", type=parse_angle, help="initial azimuthal angle")
    p.add_argument("--mixed", action="store_const", const=True, help="start from the maximally mixed state")
    p.add_argument("--kernel", choices=BUILTIN_KERNELS, help="dephasing kernel for the qnd channel")
    p.add_argument("--kappa", type=float, help="kernel strength")
    p.add_argument("--tau", type=float, help="saturation time of the quadratic-saturating kernel")
    p.add_argument("--t-max", dest="t_max", type=float, help="end of the time grid")
    p.add_argument("--points", type=int, help="number of grid points (>= 2)")
    p.add_argument("--dt", type=float, help="integrator step for check")
    p.add_argument("--tol", type=float, help="pass tolerance for check")
    p.add_argument("--out", metavar="PATH", help="write CSV here instead of standard output")


_RUN_KEYS = ("channel", "gamma0", "omega", "temp", "squeeze_r", "squeeze_phi", "theta0", "phi0",
             "mixed", "kernel", "kappa", "tau", "t_max", "points", "dt", "tol", "out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdeleter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="tabulate a single evolution on a uniform time grid")
    _add_run_flags(p)

    p = sub.add_parser("figure", help="regenerate the dataset behind fig1, fig2 or fig3")
    p.add_argument("figure", metavar="ID", help=f"one of {', '.join(FIGURES)}")
    _add_run_flags(p)

    p = sub.add_parser("sweep", help="scan one parameter, evaluating at --t-max")
    p.add_argument("--sweep", nargs=4, action="append", metavar=("AXIS", "MIN", "MAX", "STEPS"),
                   help=f"axis in {{{','.join(SWEEP_AXES)}}}; give exactly once")
    _add_run_flags(p)

    p = sub.add_parser("check", help="compare the closed form with the RK4 integrator")
    _add_run_flags(p)
    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("config", f"cannot read {path!r}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "file must contain a flat JSON object")
    values = {k.replace("-", "_"): v for k, v in data.items()}
    for key in ("theta0", "phi0", "squeeze_phi"):
        if isinstance(values.get(key), str):
            try:
                values[key] = parse_angle(values[key])
            except argparse.ArgumentTypeError as exc:
                raise ConfigError(key, str(exc)) from None
    return values


def _merged(args: argparse.Namespace) -> dict:
    values = _load_config(args.config)
    for key in _RUN_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return values


@contextlib.contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _run(args: argparse.Namespace) -> int:
    values = _merged(args)
    out = values.get("out")

    if args.command == "figure":
        if args.figure not in FIGURES:
            raise ConfigError("figure", f"expected one of {', '.join(FIGURES)}, got {args.figure!r}")
        overrides = {k: v for k, v in values.items() if k in FIGURE_DEFAULTS[args.figure]}
        ignored = sorted(k for k in values if k not in overrides and k != "out")
        if ignored:
            raise ConfigError(ignored[0], f"cannot be overridden for {args.figure}")
        ds = figure_dataset(args.figure, overrides)
        with _output(out) as fh:
            figure_csv(ds, fh)
        return EXIT_OK

    cfg = RunConfig.from_mapping(values)

    if args.command == "evolve":
        with _output(out) as fh:
            write_csv(fh, header_lines("evolve", cfg.as_header()), ("t", *STATE_COLUMNS), evolve_rows(cfg))
        return EXIT_OK

    if args.command == "sweep":
        specs = args.sweep or []
        if len(specs) != 1:
            raise ConfigError("sweep", f"exactly one --sweep axis is required, got {len(specs)}")
        axis, lo, hi, steps = specs[0]
        try:
            lo_f, hi_f, n = float(lo), float(hi), int(steps)
        except ValueError:
            raise ConfigError("sweep", f"MIN MAX STEPS must be numbers, got {lo!r} {hi!r} {steps!r}") from None
        rows = sweep_rows(cfg, axis, lo_f, hi_f, n)
        extra = [f"sweep axis={axis} min={lo_f!r} max={hi_f!r} steps={n}"]
        with _output(out) as fh:
            write_csv(fh, header_lines("sweep", cfg.as_header(), extra), (axis, *STATE_COLUMNS), rows)
        return EXIT_OK

    # check
    report = check_report(cfg)
    rows = (
        (t, *err, report.max_trace_drift, report.min_eigenvalue)
        for t, err in zip(report.t_grid, report.errors)
    )
    with _output(out) as fh:
        write_csv(
            fh,
            header_lines("check", cfg.as_header()),
            ("t", "err_sx", "err_sy", "err_sz", "max_trace_drift", "min_eigenvalue"),
            rows,
        )
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAILURE


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"qdeleter: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"qdeleter: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except InvalidArgument as exc:
        print(f"qdeleter: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
