"""
Command line entry point.

    dppsp run CONFIG
    dppsp sweep CONFIG --alpha-grid lemma2 lemma2*0.5 0.1
    dppsp validate CONFIG
    dppsp bounds CONFIG

Exit codes: 0 success, 2 solver failure, 3 config error. ``bounds`` prints
flagged rows but still exits 0.
Relative output directories are placed under ``$DPPSP_OUTPUT_ROOT`` when set.
"""

from __future__ import annotations

import argparse
import sys

from .errors import DPPSPError, ParseError, ValidationError
from .harness import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_SOLVER,
    compare_bounds,
    output_dir,
    parse_config,
    prepare,
    run_experiment,
    sweep,
    validate,
    write_bounds,
)


def build_parser():
    parser = argparse.ArgumentParser(prog="dppsp", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "run every repeat and write traces"),
        ("validate", "check the config and the mixing matrix only"),
        ("bounds", "compare measured averages with both bounds"),
    ):
        sub.add_parser(name, help=text).add_argument("config")
    sw = sub.add_parser("sweep", help="one run per stepsize")
    sw.add_argument("config")
    sw.add_argument(
        "--alpha-grid",
        nargs="+",
        required=True,
        metavar="ALPHA",
        help="numbers or lemma2 / theorem1 / auto, optionally with *factor",
    )
    return parser


def _load(path):
    """Parse and fully build the experiment; returns ``(cfg, prepared)``."""
    cfg = parse_config(path)
    return cfg, prepare(cfg)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg, prep = _load(args.config)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DPPSPError, OSError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        sys.stdout.write(validate(cfg))
        return EXIT_OK
    try:
        if args.command == "run":
            code, _ = run_experiment(cfg, prepared=prep)
        elif args.command == "sweep":
            try:
                code, _ = sweep(cfg, args.alpha_grid)
            except ValidationError as exc:
                print(f"config error: {exc}", file=sys.stderr)
                return EXIT_CONFIG
        else:
            rows, violations = compare_bounds(cfg, prepared=prep)
            out = output_dir(cfg)
            out.mkdir(parents=True, exist_ok=True)
            write_bounds(out / "bounds.csv", rows)
            for row in violations:
                print(f"flagged: {row[0]} measured={row[1]:.6g} bound={row[2]:.6g} regime_ok={row[3]}")
            code = EXIT_OK
    except DPPSPError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if code == EXIT_SOLVER:
        print("run failed; see the .partial files", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
