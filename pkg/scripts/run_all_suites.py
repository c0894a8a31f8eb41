"""Run every suite at its default configuration and write CSV + JSON reports.

Usage: python3 scripts/run_all_suites.py [--out results] [--workers 4] [--seed N]
"""

import argparse
import time
from dataclasses import replace
from pathlib import Path

from mmlab.config import parse_config
from mmlab.report import emit_report
from mmlab.suites import SUITES, run_suite


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="results")
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--seed", type=int)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in SUITES:
        cfg = parse_config(name)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        start = time.perf_counter()
        report = run_suite(name, cfg, workers=args.workers)
        emit_report(report, "csv", out / f"{name}.csv")
        emit_report(report, "json", out / f"{name}.json")
        print(f"{name:16s} {time.perf_counter() - start:6.1f}s  {report.aggregates}")


if __name__ == "__main__":
    main()
