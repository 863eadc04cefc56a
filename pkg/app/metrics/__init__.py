# app/metrics/__init__.py
"""
Evaluation metrics and their file exports.
"""

from __future__ import annotations

from .coverage import (
    Heatmap,
    accumulate_heatmap,
    compute_separation,
    compute_twr,
    coverage_statistics,
    episode_metrics,
)
from .export import paired_summary, read_metrics_csv, write_heatmap_pgm, write_metrics_csv

__all__ = [
    "Heatmap",
    "compute_twr",
    "compute_separation",
    "accumulate_heatmap",
    "coverage_statistics",
    "episode_metrics",
    "write_metrics_csv",
    "read_metrics_csv",
    "paired_summary",
    "write_heatmap_pgm",
]
