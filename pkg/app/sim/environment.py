# app/sim/environment.py
"""
Cooperative multi-balloon coverage environment.

All agents act simultaneously once per minute. Motion integrates the TRUTH wind;
everything the agents observe (their wind columns, and the global state used by the
mixer) comes from the FORECAST model.
"""

from __future__ import annotations

import math
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from app.core.errors import UsageError
from app.core.logging import get_logger
from app.core.rng import Purpose, agent_stream, derive_seed
from app.models import ALT_MAX_M, ALT_MIN_M, Action, EnvConfig
from app.sim.dynamics import AgentState, positions, step_agent
from app.sim.trace import AgentRecord, EpisodeTrace, TraceStep
from app.sim.windfield import ForecastModel, WindColumn, WindModel, build_wind_model

log = get_logger("hab-coverage.env")

TWO_PI = 2.0 * math.pi


class RewardBreakdown(NamedTuple):
    team_reward: float
    coverage_ratio: float
    dispersion: float


class StepResult(NamedTuple):
    observations: List[np.ndarray]
    state: np.ndarray
    reward: float
    done: bool


# ------------------- reward -------------------

def inside_mask(pos: np.ndarray, r_coverage: float) -> np.ndarray:
    return np.hypot(pos[:, 0], pos[:, 1]) <= r_coverage


def mean_inside_distance(pos: np.ndarray, r_coverage: float) -> Optional[float]:
    """Mean pairwise distance among agents inside the disc; None with fewer than two inside."""
    inside = pos[inside_mask(pos, r_coverage)]
    if inside.shape[0] < 2:
        return None
    return float(np.mean(pdist(inside)))


def compute_reward(states: Sequence[AgentState], config: EnvConfig) -> RewardBreakdown:
    pos = positions(states)
    n_inside = int(np.count_nonzero(inside_mask(pos, config.r_coverage)))
    coverage = n_inside / len(states)
    d_bar = mean_inside_distance(pos, config.r_coverage)
    dispersion = 0.0 if d_bar is None else min(d_bar / config.d_target, 1.0)
    reward = config.coverage_weight * coverage + config.dispersion_weight * dispersion
    return RewardBreakdown(reward, coverage, dispersion)


# ------------------- observation / state -------------------

def _agent_features(state: AgentState, config: EnvConfig) -> Dict[str, float]:
    r = config.r_coverage
    dist = state.distance
    if dist == 0.0:
        theta = 0.0
    else:
        # bearing from the agent toward the center, clockwise from north
        theta = math.atan2(-state.x, -state.y) % TWO_PI
        if theta >= TWO_PI:
            theta = 0.0
    return {
        "alt": (state.altitude - ALT_MIN_M) / (ALT_MAX_M - ALT_MIN_M),
        "px": min(max((state.x + r) / (2.0 * r), 0.0), 1.0),
        "py": min(max((state.y + r) / (2.0 * r), 0.0), 1.0),
        "w_goal": 1.0 if dist <= r else 0.0,
        "d_goal": min(max(dist / r, 0.0), 2.0),
        "theta": theta / TWO_PI,
    }


def wind_features(column: WindColumn, v_max: float) -> np.ndarray:
    """(alt_norm, bearing_norm, speed_norm) per level, flattened level-major."""
    block = np.empty((len(column), 3), dtype=np.float64)
    block[:, 0] = (column.altitudes - ALT_MIN_M) / (ALT_MAX_M - ALT_MIN_M)
    block[:, 1] = column.bearings / TWO_PI
    block[:, 2] = np.minimum(column.speeds, v_max) / v_max
    return block.ravel()


def build_observation(
    agent_id: int,
    states: Sequence[AgentState],
    forecast: WindModel,
    t: float,
    config: EnvConfig,
    column: Optional[WindColumn] = None,
) -> np.ndarray:
    me = states[agent_id]
    if column is None:
        column = forecast.sample_column(me.x, me.y, t, config.n_levels)
    f = _agent_features(me, config)
    parts = [
        np.array([f["alt"], f["px"], f["py"], f["w_goal"], f["d_goal"], f["theta"]]),
        wind_features(column, config.v_max),
    ]
    diameter = 2.0 * config.r_coverage
    for other in states:
        if other.agent_id == me.agent_id:
            continue
        g = _agent_features(other, config)
        dist = math.hypot(other.x - me.x, other.y - me.y)
        parts.append(np.array([g["px"], g["py"], min(dist / diameter, 1.0), g["alt"], g["d_goal"]]))
    return np.concatenate(parts)


def build_global_state(
    states: Sequence[AgentState],
    forecast: WindModel,
    t: float,
    config: EnvConfig,
    columns: Optional[Sequence[WindColumn]] = None,
) -> np.ndarray:
    if columns is None:
        columns = [forecast.sample_column(s.x, s.y, t, config.n_levels) for s in states]
    parts = []
    for s, column in zip(states, columns):
        f = _agent_features(s, config)
        parts.append(np.array([f["alt"], f["px"], f["py"], f["d_goal"], f["w_goal"], f["theta"]]))
        parts.append(wind_features(column, config.v_max))
    breakdown = compute_reward(states, config)
    # the coverage center is the frame origin, so its normalized position is fixed
    parts.append(np.array([0.5, 0.5, breakdown.coverage_ratio, breakdown.dispersion]))
    return np.concatenate(parts)


# ------------------- environment -------------------

class CoverageEnv:
    """
    Single-writer episode engine.

    ``reset`` builds the truth wind for the episode (from ``config.wind`` unless a
    fixed model was injected), wraps it in a seeded forecast, and places the agents.
    ``step`` returns ``StepResult``; ``done`` fires exactly at ``episode_steps``.
    Running out of gridded wind data sets ``truncated`` instead and ends the episode.
    """

    def __init__(self, config: EnvConfig, truth: Optional[WindModel] = None, record: bool = True) -> None:
        self.config = config
        self._fixed_truth = truth
        self.record = record

        self.truth: Optional[WindModel] = None
        self.forecast: Optional[WindModel] = None
        self.states: List[AgentState] = []
        self.step_index = 0
        self.episode_seed: Optional[int] = None
        self.done = False
        self.truncated = False
        self.trace: Optional[EpisodeTrace] = None
        self.controller = "unknown"
        self.info: Dict[str, float] = {}
        self._rngs: List[np.random.Generator] = []
        self._columns: List[WindColumn] = []

    @property
    def n_agents(self) -> int:
        return self.config.n_agents

    @property
    def obs_dim(self) -> int:
        return self.config.obs_dim

    @property
    def state_dim(self) -> int:
        return self.config.state_dim

    @property
    def t_minutes(self) -> float:
        return self.step_index * self.config.step_seconds / 60.0

    @property
    def finished(self) -> bool:
        return self.done or self.truncated

    def reset(self, episode_seed: int, controller: Optional[str] = None):
        cfg = self.config
        self.episode_seed = int(episode_seed)
        if controller is not None:
            self.controller = controller
        self.truth = self._fixed_truth or build_wind_model(cfg.wind, self.episode_seed, v_max=cfg.v_max)
        self.forecast = ForecastModel(
            self.truth,
            bearing_noise_sd=cfg.forecast_bearing_sd,
            speed_noise_sd=cfg.forecast_speed_sd,
            corr_length_m=cfg.forecast_corr_length_m,
            seed=derive_seed(self.episode_seed, Purpose.FORECAST),
        )

        r = cfg.r_coverage
        self.states = []
        for i in range(cfg.n_agents):
            init = agent_stream(self.episode_seed, i, Purpose.INIT)
            while True:
                x, y = init.uniform(-r, r, size=2)
                if math.hypot(x, y) <= r:
                    break
            self.states.append(AgentState(i, float(x), float(y), float(init.uniform(ALT_MIN_M, ALT_MAX_M))))
        self._rngs = [agent_stream(self.episode_seed, i, Purpose.DYNAMICS) for i in range(cfg.n_agents)]

        self.step_index = 0
        self.done = False
        self.truncated = False
        self.trace = (
            EpisodeTrace(config=cfg, seed=self.episode_seed, controller=self.controller) if self.record else None
        )
        breakdown = compute_reward(self.states, cfg)
        self.info = self._info(breakdown)
        log.debug("Reset episode seed=%s agents=%s", self.episode_seed, cfg.n_agents)
        return self._observe()

    def _observe(self):
        t = self.t_minutes
        self._columns = [
            self.forecast.sample_column(s.x, s.y, t, self.config.n_levels) for s in self.states
        ]
        observations = [
            build_observation(i, self.states, self.forecast, t, self.config, column=self._columns[i])
            for i in range(self.n_agents)
        ]
        state = build_global_state(self.states, self.forecast, t, self.config, columns=self._columns)
        return observations, state

    def forecast_column(self, agent_id: int) -> WindColumn:
        """Forecast column at the agent's current position, as last observed."""
        return self._columns[agent_id]

    def _info(self, breakdown: RewardBreakdown) -> Dict[str, float]:
        d_bar = mean_inside_distance(positions(self.states), self.config.r_coverage)
        return {
            "step": self.step_index,
            "coverage_ratio": breakdown.coverage_ratio,
            "dispersion": breakdown.dispersion,
            "separation_eval": 0.0 if d_bar is None else min(d_bar / (2.0 * self.config.r_coverage), 1.0),
            "truncated": self.truncated,
        }

    def step(self, joint_action: Sequence[int]) -> StepResult:
        if self.truth is None:
            raise UsageError("step() called before reset()")
        if self.finished:
            raise UsageError("step() called after the episode ended; call reset()")
        if len(joint_action) != self.n_agents:
            raise UsageError(f"expected {self.n_agents} actions, got {len(joint_action)}")
        actions = [Action(int(a)) for a in joint_action]

        t = self.t_minutes
        self.states = [
            step_agent(s, a, self.truth, t, rng, self.config.step_seconds)
            for s, a, rng in zip(self.states, actions, self._rngs)
        ]
        self.step_index += 1

        breakdown = compute_reward(self.states, self.config)
        self.done = self.step_index >= self.config.episode_steps
        if not self.done and self.truth.exhausted(self.t_minutes):
            self.truncated = True
            log.warning(
                "Wind data exhausted at t=%.1f min; truncating episode seed=%s at step %s",
                self.t_minutes, self.episode_seed, self.step_index,
            )
        self.info = self._info(breakdown)

        if self.trace is not None:
            self.trace.steps.append(
                TraceStep(
                    t=self.step_index,
                    agents=[AgentRecord(s.agent_id, s.x, s.y, s.altitude, a) for s, a in zip(self.states, actions)],
                    reward=breakdown.team_reward,
                    coverage_ratio=breakdown.coverage_ratio,
                    separation=breakdown.dispersion,
                )
            )
            self.trace.truncated = self.truncated

        observations, state = self._observe()
        return StepResult(observations, state, breakdown.team_reward, self.done)
