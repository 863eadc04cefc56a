from __future__ import annotations

import math
from enum import Enum, IntEnum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ALT_MIN_M = 15000.0
ALT_MAX_M = 25000.0


class Action(IntEnum):
    ASCEND = 0
    MAINTAIN = 1
    DESCEND = 2


N_ACTIONS = len(Action)


class WindKind(str, Enum):
    LAYERED = "layered"
    FAVORABLE = "favorable"
    UNIFORM = "uniform"
    RANDOM = "random"
    GRIDDED = "gridded"


class LayerSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    center_altitude_m: float
    bearing_deg: float
    speed_mps: float = Field(ge=0.0)
    vertical_extent_m: float = Field(gt=0.0)
    bearing_rate_deg_per_min: float = 0.0
    speed_rate_mps_per_min: float = 0.0


class WindSpec(BaseModel):
    """Which truth wind model an environment builds, and how."""

    model_config = ConfigDict(extra="forbid")

    kind: WindKind = WindKind.FAVORABLE
    path: Optional[str] = None
    speed_mps: float = Field(default=8.0, ge=0.0)
    bearing_deg: float = 0.0
    n_layers: int = Field(default=5, ge=1)
    layers: List[LayerSpec] = Field(default_factory=list)
    # sinusoidal modulation of layer bearing/speed, period in minutes
    modulation_period_min: float = Field(default=720.0, gt=0.0)
    bearing_modulation_deg: float = Field(default=0.0, ge=0.0)
    speed_modulation_mps: float = Field(default=0.0, ge=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_kind(self) -> "WindSpec":
        if self.kind == WindKind.GRIDDED and not self.path:
            raise ValueError("wind.path is required when wind.kind = gridded")
        if self.kind == WindKind.LAYERED and not self.layers:
            raise ValueError("wind.layers is required when wind.kind = layered")
        return self


class EnvConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_agents: int = Field(default=3, ge=1)
    n_levels: int = Field(default=37, ge=2)
    r_station: float = Field(default=50.0, gt=0.0)
    r_coverage: float = Field(default=150.0, gt=0.0)
    episode_steps: int = Field(default=2880, ge=1)
    step_seconds: float = Field(default=60.0, gt=0.0)
    coverage_weight: float = 10.0
    dispersion_weight: float = 3.0
    v_max: float = Field(default=50.0, gt=0.0)

    forecast_bearing_sd: float = Field(default=0.15, ge=0.0)
    forecast_speed_sd: float = Field(default=1.5, ge=0.0)
    forecast_corr_length_m: float = Field(default=2500.0, gt=0.0)

    seed: int = 0
    wind: WindSpec = Field(default_factory=WindSpec)

    @property
    def d_target(self) -> float:
        return self.r_coverage / math.sqrt(self.n_agents)

    @property
    def obs_dim(self) -> int:
        return 6 + 3 * self.n_levels + 5 * (self.n_agents - 1)

    @property
    def state_dim(self) -> int:
        return self.n_agents * (6 + 3 * self.n_levels) + 4

    @property
    def max_reward(self) -> float:
        return self.coverage_weight + self.dispersion_weight


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(default=1e-6, gt=0.0)
    batch_size: int = Field(default=128, ge=1)
    buffer_capacity: int = Field(default=1_000_000, ge=1)
    epsilon_start: float = Field(default=1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(default=0.05, ge=0.0, le=1.0)
    epsilon_decay_steps: int = Field(default=2_000_000, ge=1)
    gamma: float = Field(default=0.99, gt=0.0, lt=1.0)
    target_update_interval: int = Field(default=2000, ge=1)
    total_steps: int = Field(default=20_000_000, ge=0)
    warmup_steps: int = Field(default=10_000, ge=0)
    train_every: int = Field(default=1, ge=1)
    grad_clip: float = Field(default=10.0, gt=0.0)
    hidden_dim: int = Field(default=256, ge=1)
    mixing_embed_dim: int = Field(default=64, ge=1)
    hypernet_hidden_dim: int = Field(default=64, ge=1)
    eval_every_episodes: int = Field(default=50, ge=1)
    eval_episodes: int = Field(default=5, ge=1)
    bootstrap_on_timeout: bool = True
    seed: int = 0


class BaselineConfig(BaseModel):
    """Voronoi/Lloyd waypoint assignment plus greedy wind-alignment altitude control."""

    model_config = ConfigDict(extra="forbid")

    refresh_minutes: float = Field(default=15.0, gt=0.0)
    lloyd_iterations: int = Field(default=20, ge=1)
    grid_resolution_km: float = Field(default=2.0, gt=0.0)
    v_cap_mps: float = Field(default=20.0, gt=0.0)
    deadband_m: float = Field(default=250.0, ge=0.0)
    arrival_km: float = Field(default=1.0, ge=0.0)


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out_dir: Optional[str] = None
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2, 3, 4])
    workers: int = Field(default=1, ge=1)
    policy: Literal["qmix", "random"] = "qmix"
    checkpoint: Optional[str] = None
    heatmaps: bool = False

    @field_validator("seeds", mode="before")
    @classmethod
    def _split_seeds(cls, v):
        if isinstance(v, str):
            return [int(s) for s in v.replace(",", " ").split() if s]
        return v


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env: EnvConfig = Field(default_factory=EnvConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    baseline: BaselineConfig = Field(default_factory=BaselineConfig)
    run: RunSection = Field(default_factory=RunSection)


class EpisodeMetrics(BaseModel):
    """One row of the per-episode metrics CSV; identical schema for every controller."""

    model_config = ConfigDict(extra="forbid")

    seed: int
    controller: str
    n_agents: int
    steps: int
    truncated: bool = False
    mean_group_twr: float = Field(ge=0.0, le=1.0)
    mean_separation_ratio_normalized: float = Field(ge=0.0, le=1.0)
    mean_separation_ratio_train: float = Field(ge=0.0, le=1.0)
    percent_area_coverage: float = Field(ge=0.0, le=1.0)
    mean_area_per_agent: float = Field(ge=0.0, le=1.0)
    mean_coverage_over_time: float = Field(ge=0.0, le=1.0)
    episode_return: float


METRIC_FIELDS: Tuple[str, ...] = (
    "mean_group_twr",
    "mean_separation_ratio_normalized",
    "mean_separation_ratio_train",
    "percent_area_coverage",
    "mean_area_per_agent",
    "mean_coverage_over_time",
    "episode_return",
)
