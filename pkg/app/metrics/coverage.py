# app/metrics/coverage.py
"""
Episode metrics computed from traces: time within region, separation, coverage
heatmaps and the area statistics derived from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

from app.core.errors import UsageError
from app.models import EpisodeMetrics
from app.sim.trace import EpisodeTrace

HEATMAP_EXTENT_KM = 200.0
HEATMAP_CELL_KM = 5.0
GROUND_RADIUS_KM = 50.0


@dataclass(frozen=True)
class TimeWithinRegion:
    per_agent: np.ndarray
    group: float


def _inside(trace: EpisodeTrace, r_coverage: float) -> np.ndarray:
    pos = trace.positions()
    return np.hypot(pos[..., 0], pos[..., 1]) <= r_coverage


def compute_twr(trace: EpisodeTrace, r_coverage: Optional[float] = None) -> TimeWithinRegion:
    if len(trace) == 0:
        raise UsageError("cannot compute TWR of an empty trace")
    r = trace.config.r_coverage if r_coverage is None else r_coverage
    per_agent = _inside(trace, r).mean(axis=0)
    return TimeWithinRegion(per_agent=per_agent, group=float(per_agent.mean()))


def separation_series(trace: EpisodeTrace, normalization: Literal["train", "eval"] = "eval") -> np.ndarray:
    """
    Per-step separation ratio. ``train`` divides the mean inside-pair distance by
    R/√N (the reward's dispersion term); ``eval`` divides by the coverage diameter so
    teams of different sizes compare on one scale. Steps with fewer than two agents
    inside are 0.
    """
    cfg = trace.config
    if normalization == "train":
        scale = cfg.d_target
    elif normalization == "eval":
        scale = 2.0 * cfg.r_coverage
    else:
        raise UsageError(f"unknown separation normalization {normalization!r}")

    pos = trace.positions()
    inside = _inside(trace, cfg.r_coverage)
    out = np.zeros(len(trace), dtype=np.float64)
    for k in range(len(trace)):
        pts = pos[k][inside[k]]
        if pts.shape[0] >= 2:
            out[k] = min(float(np.mean(pdist(pts))) / scale, 1.0)
    return out


def compute_separation(trace: EpisodeTrace, normalization: Literal["train", "eval"] = "eval") -> float:
    if len(trace) == 0:
        return 0.0
    return float(separation_series(trace, normalization).mean())


# ------------------- heatmaps -------------------

@dataclass
class Heatmap:
    """
    Visit counts on a square grid; ``counts[row, col]`` covers the cell whose
    lower-left corner is ``origin + (col, row) * cell_size``.
    """

    origin: tuple
    cell_size: float
    counts: np.ndarray
    cap: int
    disc_radius: float
    # instantaneous fraction of in-disc cells covered, one entry per step
    covered_fraction: np.ndarray

    @property
    def height(self) -> int:
        return int(self.counts.shape[0])

    @property
    def width(self) -> int:
        return int(self.counts.shape[1])

    def cell_centers(self) -> np.ndarray:
        """(height*width, 2) array of cell-center coordinates in row-major order."""
        xs = self.origin[0] + (np.arange(self.width) + 0.5) * self.cell_size
        ys = self.origin[1] + (np.arange(self.height) + 0.5) * self.cell_size
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def disc_mask(self, disc_radius: Optional[float] = None) -> np.ndarray:
        r = self.disc_radius if disc_radius is None else disc_radius
        c = self.cell_centers()
        return (np.hypot(c[:, 0], c[:, 1]) <= r).reshape(self.counts.shape)


def empty_heatmap(
    cap: int,
    disc_radius: float,
    extent: float = HEATMAP_EXTENT_KM,
    cell_size: float = HEATMAP_CELL_KM,
) -> Heatmap:
    n = int(round(2.0 * extent / cell_size))
    return Heatmap(
        origin=(-extent, -extent),
        cell_size=cell_size,
        counts=np.zeros((n, n), dtype=np.int64),
        cap=int(cap),
        disc_radius=float(disc_radius),
        covered_fraction=np.zeros(0, dtype=np.float64),
    )


def accumulate_heatmap(
    trace: EpisodeTrace,
    ground_radius: float = GROUND_RADIUS_KM,
    agents: Optional[Sequence[int]] = None,
    *,
    extent: float = HEATMAP_EXTENT_KM,
    cell_size: float = HEATMAP_CELL_KM,
) -> Heatmap:
    """
    Each step adds, to every cell whose center is within ``ground_radius`` of an
    agent, one count per covering agent; totals are capped at the episode length.
    ``agents`` restricts the map to a subset (per-agent maps).
    """
    cfg = trace.config
    heatmap = empty_heatmap(cfg.episode_steps, cfg.r_coverage, extent, cell_size)
    centers = heatmap.cell_centers()
    in_disc = heatmap.disc_mask().ravel()
    n_disc = int(np.count_nonzero(in_disc))

    pos = trace.positions()
    if agents is not None:
        pos = pos[:, list(agents), :]

    flat = np.zeros(centers.shape[0], dtype=np.int64)
    fractions = np.zeros(len(trace), dtype=np.float64)
    for k in range(len(trace)):
        covering = (cdist(centers, pos[k]) <= ground_radius).sum(axis=1)
        flat += covering
        if n_disc:
            fractions[k] = np.count_nonzero(covering[in_disc]) / n_disc

    heatmap.counts = np.minimum(flat, heatmap.cap).reshape(heatmap.counts.shape)
    heatmap.covered_fraction = fractions
    return heatmap


@dataclass(frozen=True)
class CoverageStatistics:
    percent_area_coverage: float
    mean_coverage_over_time: float
    mean_area_per_agent: float


def percent_area(heatmap: Heatmap, disc_radius: Optional[float] = None) -> float:
    mask = heatmap.disc_mask(disc_radius)
    total = int(np.count_nonzero(mask))
    if total == 0:
        return 0.0
    return int(np.count_nonzero(heatmap.counts[mask] > 0)) / total


def coverage_statistics(
    heatmap: Heatmap,
    disc_radius: Optional[float] = None,
    per_agent: Optional[Sequence[Heatmap]] = None,
) -> CoverageStatistics:
    if disc_radius is not None and not math.isclose(disc_radius, heatmap.disc_radius):
        raise UsageError(
            f"heatmap was accumulated for disc radius {heatmap.disc_radius}, not {disc_radius}"
        )
    over_time = float(heatmap.covered_fraction.mean()) if heatmap.covered_fraction.size else 0.0
    per_agent_area = float(np.mean([percent_area(h) for h in per_agent])) if per_agent else 0.0
    return CoverageStatistics(percent_area(heatmap), over_time, per_agent_area)


# ------------------- per-episode summary -------------------

def episode_metrics(trace: EpisodeTrace, ground_radius: float = GROUND_RADIUS_KM) -> EpisodeMetrics:
    group = accumulate_heatmap(trace, ground_radius)
    singles: List[Heatmap] = [accumulate_heatmap(trace, ground_radius, agents=[i]) for i in range(trace.n_agents)]
    stats = coverage_statistics(group, per_agent=singles)
    return EpisodeMetrics(
        seed=trace.seed,
        controller=trace.controller,
        n_agents=trace.n_agents,
        steps=len(trace),
        truncated=trace.truncated,
        mean_group_twr=compute_twr(trace).group,
        mean_separation_ratio_normalized=compute_separation(trace, "eval"),
        mean_separation_ratio_train=compute_separation(trace, "train"),
        percent_area_coverage=stats.percent_area_coverage,
        mean_area_per_agent=stats.mean_area_per_agent,
        mean_coverage_over_time=stats.mean_coverage_over_time,
        episode_return=trace.episode_return,
    )
