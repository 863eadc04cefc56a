# app/metrics/export.py
from __future__ import annotations

from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.core.errors import UsageError
from app.models import METRIC_FIELDS, EpisodeMetrics
from app.metrics.coverage import Heatmap

METRICS_COLUMNS: Tuple[str, ...] = ("seed", "controller", "n_agents", "steps", "truncated") + METRIC_FIELDS
PARTITION_COLUMNS = ("t", "agent_id", "waypoint_x", "waypoint_y")


# ------------------- episode metrics -------------------

def metrics_frame(rows: Iterable[EpisodeMetrics]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in rows], columns=list(METRICS_COLUMNS))


def write_metrics_csv(rows: Iterable[EpisodeMetrics], path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    metrics_frame(rows).to_csv(p, index=False)
    return p


def read_metrics_csv(path: Union[str, Path]) -> pd.DataFrame:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"metrics file not found: {p}")
    df = pd.read_csv(p)
    missing = [c for c in METRICS_COLUMNS if c not in df.columns]
    if missing:
        raise UsageError(f"{p} is missing metrics columns: {', '.join(missing)}")
    return df


def paired_summary(a: pd.DataFrame, b: pd.DataFrame) -> pd.DataFrame:
    """
    Pair two metrics tables by seed and summarize ``b - a`` per metric field.

    Rows: one per metric field. Columns: mean/sd/min/max of each side and of the
    paired delta, plus the number of paired seeds.
    """
    shared = sorted(set(a["seed"]) & set(b["seed"]))
    if not shared:
        raise UsageError("metrics tables share no seeds; nothing to pair")
    if a["seed"].duplicated().any() or b["seed"].duplicated().any():
        raise UsageError("duplicate seeds in a metrics table")

    left = a.set_index("seed").loc[shared]
    right = b.set_index("seed").loc[shared]
    records = []
    for name in METRIC_FIELDS:
        delta = right[name].astype(float) - left[name].astype(float)
        row = {"metric": name, "n": len(shared)}
        for label, series in (("a", left[name].astype(float)), ("b", right[name].astype(float)), ("delta", delta)):
            row[f"{label}_mean"] = float(series.mean())
            # population SD so a single pair reports 0 rather than NaN
            row[f"{label}_sd"] = float(series.std(ddof=0))
            row[f"{label}_min"] = float(series.min())
            row[f"{label}_max"] = float(series.max())
        records.append(row)
    return pd.DataFrame(records)


# ------------------- heatmaps -------------------

def write_heatmap_pgm(heatmap: Heatmap, path: Union[str, Path]) -> Path:
    """Plain PGM (P2); the first data row is the northernmost row of cells."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="ascii") as f:
        f.write("P2\n")
        f.write(
            f"# hab-coverage heatmap cell_size_km={heatmap.cell_size:g} "
            f"origin_km={heatmap.origin[0]:g},{heatmap.origin[1]:g}\n"
        )
        f.write(f"{heatmap.width} {heatmap.height}\n")
        f.write(f"{max(heatmap.cap, 1)}\n")
        for row in heatmap.counts[::-1]:
            f.write(" ".join(str(int(v)) for v in row) + "\n")
    return p


def read_heatmap_pgm(path: Union[str, Path]) -> np.ndarray:
    """Counts array in ``Heatmap.counts`` orientation (row 0 = southernmost)."""
    tokens: List[str] = []
    with open(path, "r", encoding="ascii") as f:
        for line in f:
            tokens += line.split("#", 1)[0].split()
    if not tokens or tokens[0] != "P2":
        raise UsageError(f"{path} is not a plain PGM file")
    width, height = int(tokens[1]), int(tokens[2])
    values = np.array([int(v) for v in tokens[4:]], dtype=np.int64)
    if values.size != width * height:
        raise UsageError(f"{path}: expected {width * height} values, found {values.size}")
    return values.reshape(height, width)[::-1].copy()


def write_heatmap_csv(heatmap: Heatmap, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    centers = heatmap.cell_centers()
    pd.DataFrame(
        {"x_center": centers[:, 0], "y_center": centers[:, 1], "count": heatmap.counts.ravel()}
    ).to_csv(p, index=False)
    return p


# ------------------- baseline partitions -------------------

def write_partition_csv(records: Sequence[Tuple[float, int, float, float]], path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(list(records), columns=list(PARTITION_COLUMNS)).to_csv(p, index=False)
    return p
