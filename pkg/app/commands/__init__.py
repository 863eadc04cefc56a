# app/commands/__init__.py
"""
CLI subcommands for hab-coverage.

One module per subcommand, each exposing ``register(subparsers)`` and ``run(args)``.
Importing this module does not parse arguments or touch the filesystem.
"""

from __future__ import annotations

from . import baseline, compare, evaluate, replay, train

SUBCOMMANDS = (train, evaluate, baseline, compare, replay)

__all__ = ["SUBCOMMANDS", "train", "evaluate", "baseline", "compare", "replay"]
