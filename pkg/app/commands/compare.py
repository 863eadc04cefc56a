# app/commands/compare.py
from __future__ import annotations

import argparse
from pathlib import Path

from app.commands.common import log
from app.metrics.export import paired_summary, read_metrics_csv

SUMMARY_NAME = "compare.csv"


def register(subparsers) -> None:
    p = subparsers.add_parser("compare", help="paired-by-seed comparison of two metrics tables (B minus A)")
    p.add_argument("dir_a", metavar="A", help="run directory or metrics CSV")
    p.add_argument("dir_b", metavar="B", help="run directory or metrics CSV")
    p.add_argument("--out", metavar="DIR", help="also write compare.csv here")
    p.set_defaults(handler=run)


def metrics_file(path: str) -> Path:
    p = Path(path)
    return p / "metrics.csv" if p.is_dir() else p


def run(args: argparse.Namespace) -> int:
    a = read_metrics_csv(metrics_file(args.dir_a))
    b = read_metrics_csv(metrics_file(args.dir_b))
    summary = paired_summary(a, b)
    print(summary.to_string(index=False, float_format=lambda v: f"{v:.6g}"))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        summary.to_csv(out / SUMMARY_NAME, index=False)
        log.info("Comparison written to %s", out / SUMMARY_NAME)
    return 0
