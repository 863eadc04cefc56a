# app/commands/replay.py
from __future__ import annotations

import argparse
from pathlib import Path

from app.commands.common import log
from app.metrics.coverage import episode_metrics
from app.metrics.export import write_metrics_csv
from app.sim.rollout import replay_trace, verify_trace
from app.sim.trace import load_trace


def register(subparsers) -> None:
    p = subparsers.add_parser("replay", help="re-simulate a trace and check it bit-for-bit")
    p.add_argument("trace", metavar="TRACE", help="trace file written by eval or baseline")
    p.add_argument("--steps", type=int, metavar="N", help="verify only the first N steps")
    p.add_argument("--out", metavar="DIR", help="write re-derived metrics.csv here")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    recorded = load_trace(args.trace)
    if args.steps is not None:
        recorded.steps = recorded.steps[: max(args.steps, 0)]
        recorded.truncated = True

    replayed = replay_trace(recorded)
    verify_trace(recorded, replayed)
    metrics = episode_metrics(replayed)
    log.info(
        "Replay OK: %s steps, seed %s, controller %s, group TWR %.4f, return %.3f",
        len(replayed), recorded.seed, recorded.controller, metrics.mean_group_twr, metrics.episode_return,
    )
    if args.out:
        write_metrics_csv([metrics], Path(args.out) / "metrics.csv")
    return 0
