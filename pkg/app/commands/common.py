# app/commands/common.py
from __future__ import annotations

import argparse
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from app.core.config_loader import load_run_config, read_seeds_file, write_resolved_config, write_seeds_file
from app.core.logging import get_logger
from app.metrics.coverage import accumulate_heatmap
from app.metrics.export import write_heatmap_csv, write_heatmap_pgm
from app.models import RunConfig
from app.settings import get_settings
from app.sim.trace import EpisodeTrace, export_trace_csv, save_trace

log = get_logger("hab-coverage.cli")


def add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="experiment config file (INI)")
    parser.add_argument("--seed", type=int, metavar="N", help="master seed")
    parser.add_argument("--seeds", metavar="FILE", help="file listing episode seeds")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--agents", type=int, metavar="N", help="number of balloons")
    parser.add_argument("--levels", type=int, metavar="N", help="wind levels per column")
    parser.add_argument("--steps", type=int, metavar="N", help="step budget (see subcommand help)")
    parser.add_argument("--workers", type=int, metavar="N", help="processes for seed batches")


def resolve_config(args: argparse.Namespace, steps_key: Tuple[str, str]) -> RunConfig:
    """Config file (or HABCOV_CONFIG, or defaults) with CLI flags applied on top."""
    overrides: Dict[Tuple[str, str], object] = {
        ("env", "n_agents"): getattr(args, "agents", None),
        ("env", "n_levels"): getattr(args, "levels", None),
        ("run", "out_dir"): getattr(args, "out", None),
        ("run", "workers"): getattr(args, "workers", None),
        steps_key: getattr(args, "steps", None),
    }
    if getattr(args, "seed", None) is not None:
        overrides[("train", "seed")] = args.seed
        overrides[("env", "seed")] = args.seed
    if getattr(args, "seeds", None):
        overrides[("run", "seeds")] = read_seeds_file(args.seeds)
    elif getattr(args, "seed", None) is not None:
        overrides[("run", "seeds")] = [args.seed]
    for name in ("policy", "checkpoint"):
        if getattr(args, name, None) is not None:
            overrides[("run", name)] = getattr(args, name)
    if getattr(args, "heatmaps", False):
        overrides[("run", "heatmaps")] = True
    return load_run_config(getattr(args, "config", None), overrides)


def prepare_out_dir(cfg: RunConfig, command: str, seeds: Optional[List[int]] = None) -> Path:
    out = Path(cfg.run.out_dir or Path(get_settings().HABCOV_OUTPUT_DIR) / command)
    out.mkdir(parents=True, exist_ok=True)
    write_resolved_config(cfg, out)
    write_seeds_file(cfg.run.seeds if seeds is None else seeds, out)
    log.info("Output directory: %s", out)
    return out


def trace_path(out_dir: Path, seed: int) -> Path:
    return out_dir / "traces" / f"seed_{seed}.trace"


def heatmap_path(out_dir: Path, seed: int) -> Path:
    return out_dir / "heatmaps" / f"seed_{seed}.pgm"


def write_episode_outputs(trace: EpisodeTrace, out_dir: Path, heatmaps: bool) -> None:
    """Trace file plus its CSV mirror; with ``heatmaps`` also the group map as PGM and CSV."""
    path = save_trace(trace, trace_path(out_dir, trace.seed))
    export_trace_csv(trace, path.with_suffix(".csv"))
    if heatmaps:
        heatmap = accumulate_heatmap(trace)
        pgm = write_heatmap_pgm(heatmap, heatmap_path(out_dir, trace.seed))
        write_heatmap_csv(heatmap, pgm.with_suffix(".csv"))
