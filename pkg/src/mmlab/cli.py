"""Command-line entry point: ``mmlab <suite> [options]`` and ``mmlab list``."""

from __future__ import annotations

import argparse
import os
import sys

from .config import SUITE_CONFIGS, load_config
from .errors import ConfigError
from .report import emit_report
from .suites import SUITES, run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmlab", description="Run a metric-measure experiment suite.")
    parser.add_argument("suite", help="suite name, or 'list' to show the available suites")
    parser.add_argument("--config", help="flat 'key = value' config file")
    parser.add_argument("--seed", type=int, help="master seed (overrides config and MMLAB_SEED)")
    parser.add_argument("--out", help="output path (stdout when omitted)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--timing", action="store_true", help="include wall-clock time in JSON output")
    return parser


def _list_suites() -> str:
    width = max(len(name) for name in SUITES)
    return "".join(f"{name.ljust(width)}  {info.anchor}\n" for name, info in SUITES.items())


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    if args.suite == "list":
        sys.stdout.write(_list_suites())
        return EXIT_OK

    try:
        if args.suite not in SUITE_CONFIGS:
            raise ConfigError(f"unknown suite {args.suite!r}; try 'mmlab list'")
        overrides = {}
        env_seed = os.environ.get("MMLAB_SEED")
        if env_seed is not None:
            try:
                overrides["seed"] = int(env_seed)
            except ValueError as exc:
                raise ConfigError(f"MMLAB_SEED must be an integer, got {env_seed!r}") from exc
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        config = load_config(args.suite, args.config, overrides)
    except ConfigError as exc:
        print(f"mmlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        report = run_suite(args.suite, config, workers=args.workers)
        text = emit_report(report, args.format, args.out, include_timing=args.timing)
    except Exception as exc:  # noqa: BLE001 - any failure here is a runtime error
        print(f"mmlab: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
