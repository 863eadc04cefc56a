# app/sim/__init__.py
"""
Simulation for hab-coverage.

This subpackage groups the wind fields, balloon dynamics, the multi-agent
coverage environment, and episode traces.
"""

from __future__ import annotations

from .dynamics import AgentState, step_agent, within_coverage
from .environment import (
    CoverageEnv,
    StepResult,
    build_global_state,
    build_observation,
    compute_reward,
)
from .parallel_env import HabCoverageParallelEnv
from .rollout import RandomController, ScriptedController, replay_trace, run_batch, run_episode, verify_trace
from .trace import EpisodeTrace, load_trace, save_trace
from .windfield import (
    ForecastModel,
    GriddedWindModel,
    LayeredWindModel,
    WindColumn,
    WindSample,
    build_wind_model,
    load_gridded_wind,
    sample_column,
    sample_wind,
)

__all__ = [
    # wind
    "WindSample",
    "WindColumn",
    "LayeredWindModel",
    "ForecastModel",
    "GriddedWindModel",
    "sample_wind",
    "sample_column",
    "load_gridded_wind",
    "build_wind_model",
    # dynamics
    "AgentState",
    "step_agent",
    "within_coverage",
    # environment
    "CoverageEnv",
    "StepResult",
    "compute_reward",
    "build_observation",
    "build_global_state",
    "HabCoverageParallelEnv",
    # rollouts
    "RandomController",
    "ScriptedController",
    "run_episode",
    "run_batch",
    "replay_trace",
    "verify_trace",
    # traces
    "EpisodeTrace",
    "load_trace",
    "save_trace",
]
