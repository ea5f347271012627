"""``fpp`` command line: run, plot, validate."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..estimators import worker_count
from ..weights import validate_assumptions
from .config import ConfigError, load
from .experiments import NEEDS_ASSUMPTIONS, run_experiment
from .records import PLOT_COLUMNS, PlotError, emit_plot_data, read_jsonl, stamp, write_jsonl

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSUMPTIONS = 2
EXIT_UNCERTIFIED = 3


def _assumption_gate(cfg) -> int:
    if cfg.name not in NEEDS_ASSUMPTIONS:
        return EXIT_OK
    report = validate_assumptions(cfg.dist, cfg.d)
    if report.ok:
        return EXIT_OK
    print(f"assumption check failed for {cfg.dist} in d={cfg.d}: {report.diagnostic()}", file=sys.stderr)
    return EXIT_ASSUMPTIONS


def cmd_run(args) -> int:
    try:
        cfg = load(args.config)
    except (ConfigError, OSError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    force = args.force or cfg.force
    if not force:
        code = _assumption_gate(cfg)
        if code:
            return code
    workers = worker_count(cfg.workers)
    records = stamp(run_experiment(cfg, workers))
    out = args.output or cfg.output or str(Path(args.config).with_suffix(".jsonl"))
    write_jsonl(records, out)
    print(f"{len(records)} records -> {out}", file=sys.stderr)
    if any(not r.certified for r in records):
        print("some passage times were not certified within the window cap", file=sys.stderr)
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        records = read_jsonl(args.records)
        text = emit_plot_data(records, args.kind, args.output)
    except (PlotError, OSError, ValueError) as exc:
        print(f"plot failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = load(args.config)
    except (ConfigError, OSError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = validate_assumptions(cfg.dist, cfg.d)
    print(f"{cfg.name}: {cfg.dist}, d={cfg.d}, config hash {cfg.hash()}")
    print(report.diagnostic())
    if not report.ok and cfg.name in NEEDS_ASSUMPTIONS and not (args.force or cfg.force):
        return EXIT_ASSUMPTIONS
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpp", description="First-passage percolation experiments")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("-o", "--output", help="records file (JSON lines)")
    r.add_argument("--force", action="store_true", help="skip the (A1)/(A2) checks")
    r.set_defaults(func=cmd_run)

    pl = sub.add_parser("plot", help="export records as TSV")
    pl.add_argument("records")
    pl.add_argument("--kind", default="generic", choices=sorted(PLOT_COLUMNS))
    pl.add_argument("-o", "--output")
    pl.set_defaults(func=cmd_plot)

    v = sub.add_parser("validate", help="parse a config and check the assumptions")
    v.add_argument("config")
    v.add_argument("--force", action="store_true")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
