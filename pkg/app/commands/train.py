# app/commands/train.py
from __future__ import annotations

import argparse

from app.commands.common import add_common_flags, log, prepare_out_dir, resolve_config
from app.qmix.trainer import Trainer
from app.settings import get_settings


def register(subparsers) -> None:
    p = subparsers.add_parser("train", help="train QMIX; --steps sets train.total_steps")
    add_common_flags(p)
    p.add_argument("--resume", metavar="CHECKPOINT", help="continue from a checkpoint")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args, ("train", "total_steps"))
    out = prepare_out_dir(cfg, "train", seeds=[cfg.train.seed])
    resume = args.resume or cfg.run.checkpoint
    result = Trainer(cfg.env, cfg.train, out, device=get_settings().HABCOV_DEVICE).run(resume_from=resume)
    log.info(
        "Training finished: %s env steps, %s episodes, %s curve rows; checkpoint %s",
        result.env_steps, result.episodes, len(result.curve), result.checkpoint_path,
    )
    return 0
