"""Command-line entry point: ``irsfso <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.  ``IRSFSO_WORKERS`` sets the default Monte-Carlo worker count;
``--workers`` overrides it.
"""
from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, load_config
from .experiments import COMMANDS
from .wave import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
WORKERS_ENV = "IRSFSO_WORKERS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irsfso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        p.add_argument("--config", help="configuration file (key = value lines)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one configuration key (repeatable)")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, help="Monte-Carlo seed (overrides mc.seed)")
        p.add_argument("--workers", type=int, help=f"worker count (overrides ${WORKERS_ENV} and mc.workers)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
    except OSError as exc:
        print(f"irsfso: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    overrides = list(args.set)
    workers = args.workers
    if workers is None and os.environ.get(WORKERS_ENV):
        try:
            workers = int(os.environ[WORKERS_ENV])
        except ValueError:
            print(f"irsfso: {WORKERS_ENV} must be an integer", file=sys.stderr)
            return EXIT_CONFIG
    if workers is not None:
        overrides.append(f"mc.workers={workers}")
    if args.seed is not None:
        overrides.append(f"mc.seed={args.seed}")

    try:
        cfg = load_config(text, overrides, command=args.command)
        table = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"irsfso: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"irsfso: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # invalid geometry or parameter combinations surfaced by the engines
        print(f"irsfso: invalid setup: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.out:
            table.write(args.out)
        else:
            sys.stdout.write(table.to_csv())
    except OSError as exc:
        print(f"irsfso: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK
