# tests/conftest.py
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np
import pytest

from app.models import Action, EnvConfig, TrainConfig
from app.settings import get_settings
from app.sim.dynamics import AgentState
from app.sim.environment import compute_reward
from app.sim.trace import AgentRecord, EpisodeTrace, TraceStep
from app.sim.windfield import LayeredWindModel, WindLayer


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running check; runs only with HABCOV_RUN_SLOW_TESTS=1")


def pytest_collection_modifyitems(config, items):
    if get_settings().HABCOV_RUN_SLOW_TESTS:
        return
    skip_slow = pytest.mark.skip(reason="set HABCOV_RUN_SLOW_TESTS=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch):
    monkeypatch.delenv("HABCOV_SENTRY_DSN", raising=False)
    monkeypatch.delenv("HABCOV_CONFIG", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# ------------------- configs -------------------

@pytest.fixture
def small_env_cfg() -> EnvConfig:
    return EnvConfig(n_agents=3, n_levels=5, episode_steps=20)


@pytest.fixture
def exact_forecast_cfg() -> EnvConfig:
    return EnvConfig(
        n_agents=3,
        n_levels=5,
        episode_steps=20,
        forecast_bearing_sd=0.0,
        forecast_speed_sd=0.0,
    )


@pytest.fixture
def tiny_train_cfg() -> TrainConfig:
    return TrainConfig(
        learning_rate=1e-3,
        batch_size=4,
        buffer_capacity=500,
        warmup_steps=5,
        epsilon_decay_steps=50,
        target_update_interval=5,
        total_steps=30,
        hidden_dim=16,
        mixing_embed_dim=8,
        hypernet_hidden_dim=8,
        eval_every_episodes=1,
        eval_episodes=1,
        seed=11,
    )


@pytest.fixture
def uniform_wind() -> LayeredWindModel:
    # 10 m/s toward the east at every altitude
    return LayeredWindModel([WindLayer(20000.0, 0.5 * math.pi, 10.0, math.inf)])


# ------------------- hand-built traces -------------------

def build_trace(
    config: EnvConfig,
    xy: Sequence[Sequence[Sequence[float]]],
    altitudes: Optional[np.ndarray] = None,
    seed: int = 0,
    controller: str = "handmade",
) -> EpisodeTrace:
    """Trace from a (steps, agents, 2) position array; team columns follow compute_reward."""
    pos = np.asarray(xy, dtype=np.float64)
    n_steps, n_agents = pos.shape[0], pos.shape[1]
    alts = np.full((n_steps, n_agents), 20000.0) if altitudes is None else np.asarray(altitudes)
    trace = EpisodeTrace(config=config, seed=seed, controller=controller, truncated=n_steps != config.episode_steps)
    for k in range(n_steps):
        states = [AgentState(i, float(pos[k, i, 0]), float(pos[k, i, 1]), float(alts[k, i])) for i in range(n_agents)]
        breakdown = compute_reward(states, config)
        trace.steps.append(
            TraceStep(
                t=k + 1,
                agents=[AgentRecord(s.agent_id, s.x, s.y, s.altitude, Action.MAINTAIN) for s in states],
                reward=breakdown.team_reward,
                coverage_ratio=breakdown.coverage_ratio,
                separation=breakdown.dispersion,
            )
        )
    return trace


@pytest.fixture
def make_trace() -> Callable[..., EpisodeTrace]:
    return build_trace
