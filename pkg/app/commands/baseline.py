# app/commands/baseline.py
from __future__ import annotations

import argparse
from functools import partial
from pathlib import Path

from app.baseline.voronoi import run_baseline_episode
from app.commands.common import add_common_flags, log, prepare_out_dir, resolve_config, write_episode_outputs
from app.metrics.coverage import episode_metrics
from app.metrics.export import write_metrics_csv, write_partition_csv
from app.models import BaselineConfig, EnvConfig, EpisodeMetrics
from app.sim.rollout import run_batch

METRICS_NAME = "metrics.csv"


def register(subparsers) -> None:
    p = subparsers.add_parser("baseline", help="Voronoi/Lloyd baseline per seed; --steps sets env.episode_steps")
    add_common_flags(p)
    p.add_argument("--heatmaps", action="store_true", help="also write per-seed coverage heatmaps")
    p.set_defaults(handler=run)


def baseline_seed(
    seed: int,
    env_cfg: EnvConfig,
    baseline_cfg: BaselineConfig,
    out_dir: Path,
    heatmaps: bool,
) -> EpisodeMetrics:
    trace, partitions = run_baseline_episode(env_cfg, seed, baseline_cfg)
    write_episode_outputs(trace, out_dir, heatmaps)
    write_partition_csv(partitions, out_dir / "partitions" / f"seed_{seed}.csv")
    return episode_metrics(trace)


def run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("env", "episode_steps"))
    out = prepare_out_dir(cfg, "baseline")
    job = partial(baseline_seed, env_cfg=cfg.env, baseline_cfg=cfg.baseline, out_dir=out, heatmaps=cfg.run.heatmaps)
    rows = run_batch(job, cfg.run.seeds, cfg.run.workers)
    path = write_metrics_csv(rows, out / METRICS_NAME)
    log.info("Baseline ran %s seeds; metrics in %s", len(rows), path)
    return 0
