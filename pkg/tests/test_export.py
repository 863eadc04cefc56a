# tests/test_export.py
from __future__ import annotations

import pandas as pd
import pytest

from app.core.errors import UsageError
from app.metrics.export import (
    METRICS_COLUMNS,
    PARTITION_COLUMNS,
    metrics_frame,
    paired_summary,
    read_metrics_csv,
    write_metrics_csv,
    write_partition_csv,
)
from app.models import METRIC_FIELDS, EpisodeMetrics


def _row(seed: int, controller: str, twr: float, ret: float = 100.0) -> EpisodeMetrics:
    return EpisodeMetrics(
        seed=seed,
        controller=controller,
        n_agents=3,
        steps=480,
        mean_group_twr=twr,
        mean_separation_ratio_normalized=0.2,
        mean_separation_ratio_train=0.6,
        percent_area_coverage=0.3,
        mean_area_per_agent=0.1,
        mean_coverage_over_time=0.25,
        episode_return=ret,
    )


def test_metrics_csv_round_trip(tmp_path):
    rows = [_row(1, "qmix", 0.5), _row(2, "qmix", 0.7)]
    path = write_metrics_csv(rows, tmp_path / "eval" / "metrics.csv")
    df = read_metrics_csv(path)
    assert list(df.columns) == list(METRICS_COLUMNS)
    assert df["seed"].tolist() == [1, 2]
    assert df["mean_group_twr"].tolist() == [0.5, 0.7]


def test_read_rejects_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    metrics_frame([_row(1, "qmix", 0.5)]).drop(columns=["episode_return"]).to_csv(path, index=False)
    with pytest.raises(UsageError, match="episode_return"):
        read_metrics_csv(path)
    with pytest.raises(UsageError):
        read_metrics_csv(tmp_path / "absent.csv")


def test_paired_summary_arithmetic():
    a = metrics_frame([_row(1, "voronoi", 0.5, 100.0), _row(2, "voronoi", 0.4, 200.0)])
    b = metrics_frame([_row(2, "qmix", 0.9, 260.0), _row(1, "qmix", 0.8, 100.0), _row(3, "qmix", 0.1)])
    summary = paired_summary(a, b).set_index("metric")
    assert list(summary.index) == list(METRIC_FIELDS)
    twr = summary.loc["mean_group_twr"]
    assert twr["n"] == 2
    assert twr["a_mean"] == pytest.approx(0.45)
    assert twr["b_mean"] == pytest.approx(0.85)
    # deltas 0.3 and 0.5
    assert twr["delta_mean"] == pytest.approx(0.4)
    assert twr["delta_sd"] == pytest.approx(0.1)
    assert (twr["delta_min"], twr["delta_max"]) == pytest.approx((0.3, 0.5))
    ret = summary.loc["episode_return"]
    assert (ret["delta_mean"], ret["delta_sd"]) == pytest.approx((30.0, 30.0))


def test_identical_tables_have_zero_deltas():
    a = metrics_frame([_row(s, "qmix", 0.1 * s) for s in range(1, 5)])
    summary = paired_summary(a, a.copy())
    for col in ("delta_mean", "delta_sd", "delta_min", "delta_max"):
        assert (summary[col] == 0.0).all()


def test_single_pair_has_zero_spread():
    a = metrics_frame([_row(1, "voronoi", 0.5)])
    b = metrics_frame([_row(1, "qmix", 0.7)])
    twr = paired_summary(a, b).set_index("metric").loc["mean_group_twr"]
    assert twr["delta_sd"] == 0.0


def test_pairing_errors():
    a = metrics_frame([_row(1, "voronoi", 0.5)])
    with pytest.raises(UsageError, match="share no seeds"):
        paired_summary(a, metrics_frame([_row(2, "qmix", 0.5)]))
    with pytest.raises(UsageError, match="duplicate"):
        paired_summary(a, metrics_frame([_row(1, "qmix", 0.5), _row(1, "qmix", 0.6)]))


def test_partition_csv(tmp_path):
    path = write_partition_csv([(0.0, 0, 10.0, -5.0), (15.0, 1, -3.0, 2.0)], tmp_path / "partitions.csv")
    df = pd.read_csv(path)
    assert tuple(df.columns) == PARTITION_COLUMNS
    assert df["agent_id"].tolist() == [0, 1]
