# app/main.py
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import torch

from app import __version__
from app.commands import SUBCOMMANDS
from app.core.config_loader import dump_config
from app.core.errors import HabCoverageError
from app.core.logging import get_logger, setup_logging
from app.core.reporting import init_error_reporting, report_error
from app.models import RunConfig
from app.settings import get_settings

log = get_logger("hab-coverage.cli")


class CliParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> CliParser:
    parser = CliParser(
        prog="hab-coverage",
        description="Multi-balloon area coverage: QMIX training, Voronoi baseline, evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--dump-defaults", action="store_true", help="print the default config file and exit")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for module in SUBCOMMANDS:
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    s = get_settings()
    setup_logging(s.HABCOV_LOG_LEVEL)
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.dump_defaults:
        sys.stdout.write(dump_config(RunConfig()))
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1

    init_error_reporting(s)
    torch.set_num_threads(max(1, s.HABCOV_TORCH_THREADS))
    log.info(
        "---------- HAB COVERAGE ----------\n"
        f"Version: {__version__}\n"
        f"Environment: {s.HABCOV_ENVIRONMENT}\n"
        f"Command: {args.command}\n"
        f"Device: {s.HABCOV_DEVICE}\n"
        "----------------------------------"
    )

    try:
        return int(args.handler(args))
    except HabCoverageError as e:
        log.error("%s failed: %s", args.command, e.detail)
        report_error(e)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
