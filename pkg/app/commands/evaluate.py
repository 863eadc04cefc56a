# app/commands/evaluate.py
from __future__ import annotations

import argparse
from functools import partial
from pathlib import Path
from typing import Optional

from app.commands.common import add_common_flags, log, prepare_out_dir, resolve_config, write_episode_outputs
from app.core.errors import UsageError
from app.metrics.coverage import episode_metrics
from app.metrics.export import write_metrics_csv
from app.models import EnvConfig, EpisodeMetrics
from app.qmix.checkpoint import learner_from_checkpoint, load_checkpoint
from app.qmix.trainer import QmixController
from app.sim.environment import CoverageEnv
from app.sim.rollout import RandomController, run_batch, run_episode

METRICS_NAME = "metrics.csv"


def register(subparsers) -> None:
    p = subparsers.add_parser("eval", help="greedy evaluation per seed; --steps sets env.episode_steps")
    add_common_flags(p)
    p.add_argument("--checkpoint", metavar="PATH", help="trained QMIX checkpoint")
    p.add_argument("--policy", choices=["qmix", "random"], help="controller to evaluate (default qmix)")
    p.add_argument("--heatmaps", action="store_true", help="also write per-seed coverage heatmaps")
    p.set_defaults(handler=run)


def evaluate_seed(
    seed: int,
    env_cfg: EnvConfig,
    policy: str,
    checkpoint: Optional[str],
    out_dir: Path,
    heatmaps: bool,
    policy_seed: int = 0,
) -> EpisodeMetrics:
    if policy == "random":
        controller = RandomController(policy_seed)
    else:
        payload = load_checkpoint(checkpoint, expected=env_cfg)
        controller = QmixController(learner_from_checkpoint(payload))
    trace = run_episode(CoverageEnv(env_cfg, record=True), controller, seed)
    write_episode_outputs(trace, out_dir, heatmaps)
    return episode_metrics(trace)


def run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("env", "episode_steps"))
    policy = cfg.run.policy
    if policy == "qmix":
        if not cfg.run.checkpoint:
            raise UsageError("eval with policy qmix needs --checkpoint (or run.checkpoint)")
        # fail fast on a dimension mismatch before fanning out
        load_checkpoint(cfg.run.checkpoint, expected=cfg.env)

    out = prepare_out_dir(cfg, "eval")
    job = partial(
        evaluate_seed,
        env_cfg=cfg.env,
        policy=policy,
        checkpoint=cfg.run.checkpoint,
        out_dir=out,
        heatmaps=cfg.run.heatmaps,
        policy_seed=cfg.train.seed,
    )
    rows = run_batch(job, cfg.run.seeds, cfg.run.workers)
    path = write_metrics_csv(rows, out / METRICS_NAME)
    log.info("Evaluated %s seeds with policy %s; metrics in %s", len(rows), policy, path)
    return 0
