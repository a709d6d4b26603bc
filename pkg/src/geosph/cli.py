"""Command-line interface.

Subcommands:
  run              execute a simulation
  validate-config  parse and validate, run nothing
  report           stabilizer comparison sweep (slope scenario)

Exit codes: 0 success, 2 configuration error, 3 numerical abort, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import backends
from .config import ConfigError, SimConfig, apply_overrides, parse_config_text
from .report import run_comparison
from .runner import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _add_common(parser):
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--scenario", choices=("cylinder_drop", "vertical_cut", "custom"))
    parser.add_argument("--stabilizer",
                        choices=("conventional", "adaptive", "artificial-stress"))
    parser.add_argument("--eps", type=float, help="artificial stress coefficient")
    parser.add_argument("--end-time", type=float, dest="end_time")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", dest="formats", help="snapshot formats: csv, vtk, or csv,vtk")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key (repeatable)")
    parser.add_argument("--backend", choices=("auto", "c", "python"), default="auto")
    parser.add_argument("--progress", action="store_true", help="print progress lines")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geosph",
        description="Plane-strain SPH for elastoplastic geomaterials with "
                    "adaptive-kernel tensile-instability control.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("run", "run one simulation"),
        ("validate-config", "validate configuration and exit"),
        ("report", "stabilizer comparison sweep"),
    ):
        p = sub.add_parser(name, help=desc)
        _add_common(p)
    return parser


def _load_config(args) -> SimConfig:
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
        cfg = parse_config_text(text)
        if args.scenario and args.scenario != cfg.scenario:
            cfg = parse_config_text(text, base=SimConfig.for_scenario(args.scenario))
    else:
        cfg = SimConfig.for_scenario(args.scenario or "vertical_cut")
    if args.stabilizer:
        cfg.stabilizer = args.stabilizer
    if args.eps is not None:
        cfg.eps_as = args.eps
    if args.end_time is not None:
        cfg.end_time = args.end_time
    if args.out:
        cfg.out_dir = args.out
    if args.formats:
        cfg.formats = args.formats
    apply_overrides(cfg, args.set)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    if args.command == "validate-config":
        print("configuration ok")
        return EXIT_OK

    try:
        backend = backends.get_backend(args.backend)
    except (ImportError, ValueError) as exc:
        print(f"configuration error: backend unavailable ({exc})", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "run":
            result = run(cfg, keep_frames=False, progress=args.progress, backend=backend)
            if result.status == "aborted":
                print(f"numerical abort at t={result.final_time}: {result.message}",
                      file=sys.stderr)
                return EXIT_NUMERICAL
            print(f"completed {result.steps} steps to t={result.final_time}; "
                  f"report: {result.report_path}")
            return EXIT_OK
        if args.command == "report":
            rows = run_comparison(cfg, cfg.out_dir, progress=args.progress, backend=backend)
            print(f"comparison written under {cfg.out_dir} "
                  f"({len(rows)} modes)")
            return EXIT_OK
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
