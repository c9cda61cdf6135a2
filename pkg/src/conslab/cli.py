"""Command line entry point: ``conslab <riemann|solve|verify|compare|order>``.

Every subcommand reads an experiment file (see :mod:`conslab.harness`),
writes ``report.json`` to the output directory and exits with 0 when all
declared tolerances pass, 1 when some fail and 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError
from .harness import (dumps, load_config, order_experiment, riemann_report, run_experiment,
                      solve_experiment, verify_experiment, write_report, write_snapshots)

COMMANDS = {
    "solve": solve_experiment,
    "verify": verify_experiment,
    "compare": run_experiment,
    "order": order_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "riemann": "admissibility report for the configured jump",
        "solve": "run the method matrix and write snapshots",
        "verify": "entropy certificate for every method",
        "compare": "pairwise L1 agreement and oracle errors",
        "order": "empirical convergence orders along the ladder",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="experiment INI file")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="snapshot format")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.out)
        if args.command == "riemann":
            verdict = riemann_report(cfg)
            print(dumps(verdict))
            write_report(verdict, cfg.out)
            return 0
        report = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    write_snapshots(report.runs, cfg.out, args.format, times=cfg.times)
    path = write_report(report, cfg.out)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.6g} (tolerance {c.tolerance:g})")
    for cell, msg in sorted(report.errors.items()):
        print(f"ERROR {cell}: {msg}")
    print(f"report: {path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
