# app/core/__init__.py
"""
Core utilities for hab-coverage.

This subpackage groups logging, the error contract, seeded random streams,
experiment config files, and error reporting.
"""

from __future__ import annotations

from .config_loader import dump_config, load_run_config, read_seeds_file, write_resolved_config
from .errors import (
    CheckpointError,
    ConfigError,
    HabCoverageError,
    TraceParseError,
    UsageError,
    VerificationError,
    WindDomainError,
    WindParseError,
)
from .logging import get_logger, setup_logging
from .reporting import init_error_reporting, report_error
from .rng import Purpose, agent_stream, derive_seed, stream

__all__ = [
    # logging
    "get_logger",
    "setup_logging",
    # errors
    "HabCoverageError",
    "WindDomainError",
    "WindParseError",
    "UsageError",
    "ConfigError",
    "TraceParseError",
    "CheckpointError",
    "VerificationError",
    # rng
    "Purpose",
    "stream",
    "agent_stream",
    "derive_seed",
    # config
    "load_run_config",
    "dump_config",
    "write_resolved_config",
    "read_seeds_file",
    # reporting
    "init_error_reporting",
    "report_error",
]
