#!/usr/bin/env python3
# scripts/plot_results.py
"""
Figures for a finished experiment directory (see run_experiment.sh).

  python scripts/plot_results.py runs/desk_scale --out runs/desk_scale/figures

Needs the ``plot`` extra (matplotlib).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from app.core.logging import get_logger, setup_logging  # noqa: E402
from app.metrics.coverage import HEATMAP_CELL_KM, HEATMAP_EXTENT_KM  # noqa: E402
from app.metrics.export import read_heatmap_pgm, read_metrics_csv  # noqa: E402
from app.models import METRIC_FIELDS, EnvConfig  # noqa: E402

log = get_logger("hab-coverage.plot")

CONTROLLER_DIRS = ("random", "baseline", "qmix")


def plot_learning_curve(train_dir: Path, out: Path) -> None:
    curve = pd.read_csv(train_dir / "metrics.csv")
    fig, axes = plt.subplots(1, 3, figsize=(15, 4), squeeze=False)
    for ax, field in zip(axes[0], ("mean_reward", "mean_group_twr", "mean_separation_ratio")):
        ax.plot(curve["step"], curve[field])
        ax.set_xlabel("environment steps")
        ax.set_title(field)
    plt.tight_layout()
    plt.savefig(out, dpi=150)
    plt.close(fig)
    log.info("Saved %s", out)


def plot_metric_bars(root: Path, out: Path) -> None:
    frames: List[pd.DataFrame] = []
    for name in CONTROLLER_DIRS:
        path = root / name / "metrics.csv"
        if path.exists():
            frames.append(read_metrics_csv(path))
    if not frames:
        log.warning("No controller metrics under %s", root)
        return
    df = pd.concat(frames, ignore_index=True)
    summary = df.groupby("controller")[list(METRIC_FIELDS[:-1])].agg(["mean", "std"])

    fields = METRIC_FIELDS[:-1]
    fig, axes = plt.subplots(1, len(fields), figsize=(4 * len(fields), 4), squeeze=False)
    for ax, field in zip(axes[0], fields):
        means = summary[(field, "mean")]
        sds = summary[(field, "std")].fillna(0.0)
        ax.bar(means.index, means.values, yerr=sds.values, capsize=4)
        ax.set_ylim(0.0, 1.0)
        ax.set_title(field, fontsize=9)
    plt.tight_layout()
    plt.savefig(out, dpi=150)
    plt.close(fig)
    log.info("Saved %s", out)


def plot_twr_scatter(root: Path, out: Path) -> None:
    """Group TWR against every other per-episode metric, one colour per controller."""
    fields = [f for f in METRIC_FIELDS if f not in ("mean_group_twr", "episode_return")]
    fig, axes = plt.subplots(1, len(fields), figsize=(4 * len(fields), 4), squeeze=False)
    plotted = False
    for name in CONTROLLER_DIRS:
        path = root / name / "metrics.csv"
        if not path.exists():
            continue
        df = read_metrics_csv(path)
        for ax, field in zip(axes[0], fields):
            ax.scatter(df["mean_group_twr"], df[field], label=name, s=14)
        plotted = True
    if not plotted:
        plt.close(fig)
        return
    for ax, field in zip(axes[0], fields):
        ax.set_xlabel("mean_group_twr")
        ax.set_ylabel(field, fontsize=9)
    axes[0, 0].legend()
    plt.tight_layout()
    plt.savefig(out, dpi=150)
    plt.close(fig)
    log.info("Saved %s", out)


def plot_heatmaps(root: Path, out_dir: Path) -> None:
    half = HEATMAP_EXTENT_KM
    r_coverage = EnvConfig().r_coverage
    for name in CONTROLLER_DIRS:
        maps = sorted((root / name / "heatmaps").glob("seed_*.pgm"))
        if not maps:
            continue
        # mean over seeds; row 0 is the southernmost row
        grid = np.mean([read_heatmap_pgm(p) for p in maps], axis=0)
        fig, ax = plt.subplots(figsize=(5, 5))
        im = ax.imshow(grid, origin="lower", extent=[-half, half, -half, half], cmap="viridis")
        ax.add_patch(plt.Circle((0.0, 0.0), r_coverage, fill=False, color="white", linestyle="--"))
        ax.set_xlabel("x [km]")
        ax.set_ylabel("y [km]")
        ax.set_title(f"{name}: mean coverage count ({len(maps)} seeds, {HEATMAP_CELL_KM:g} km cells)")
        fig.colorbar(im, ax=ax)
        target = out_dir / f"heatmap_{name}.png"
        plt.tight_layout()
        plt.savefig(target, dpi=150)
        plt.close(fig)
        log.info("Saved %s", target)


def main() -> int:
    ap = argparse.ArgumentParser(description="Plot hab-coverage experiment results")
    ap.add_argument("root", type=str, help="experiment directory (OUT_ROOT of run_experiment.sh)")
    ap.add_argument("--out", type=str, default=None, help="figure directory (default: ROOT/figures)")
    args = ap.parse_args()

    setup_logging("INFO")
    root = Path(args.root)
    out_dir = Path(args.out) if args.out else root / "figures"
    out_dir.mkdir(parents=True, exist_ok=True)

    if (root / "train" / "metrics.csv").exists():
        plot_learning_curve(root / "train", out_dir / "learning_curve.png")
    plot_metric_bars(root, out_dir / "metrics.png")
    plot_twr_scatter(root, out_dir / "twr_scatter.png")
    plot_heatmaps(root, out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
