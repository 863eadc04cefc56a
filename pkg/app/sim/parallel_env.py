# app/sim/parallel_env.py
"""PettingZoo ``ParallelEnv`` view of CoverageEnv for external MARL libraries."""

from __future__ import annotations

import functools
from typing import Dict, Optional

import numpy as np
from gymnasium import spaces
from pettingzoo import ParallelEnv

from app.core.rng import Purpose, derive_seed
from app.models import N_ACTIONS, EnvConfig
from app.sim.environment import CoverageEnv
from app.sim.windfield import WindModel


class HabCoverageParallelEnv(ParallelEnv):
    metadata = {"render_modes": [], "name": "hab_coverage_v1"}

    def __init__(self, config: EnvConfig, truth: Optional[WindModel] = None, record: bool = False) -> None:
        self.config = config
        self.env = CoverageEnv(config, truth=truth, record=record)
        self.possible_agents = [f"balloon_{i}" for i in range(config.n_agents)]
        self.agents = []
        self.render_mode = None
        self._episodes = 0
        self._state: Optional[np.ndarray] = None

        self.observation_spaces = {a: self.observation_space(a) for a in self.possible_agents}
        self.action_spaces = {a: self.action_space(a) for a in self.possible_agents}

    @functools.lru_cache(maxsize=None)
    def observation_space(self, agent):
        high = np.ones(self.config.obs_dim, dtype=np.float32)
        # d_goal entries saturate at 2: own goal distance and each teammate's
        high[4] = 2.0
        base = 6 + 3 * self.config.n_levels
        for k in range(self.config.n_agents - 1):
            high[base + 5 * k + 4] = 2.0
        return spaces.Box(low=0.0, high=high, dtype=np.float32)

    @functools.lru_cache(maxsize=None)
    def action_space(self, agent):
        return spaces.Discrete(N_ACTIONS)

    def state(self) -> np.ndarray:
        return self._state

    def _obs_dict(self, observations) -> Dict[str, np.ndarray]:
        return {a: obs.astype(np.float32) for a, obs in zip(self.possible_agents, observations)}

    def reset(self, seed=None, options=None):
        if seed is None:
            seed = derive_seed(self.config.seed, Purpose.TRAIN_EPISODE, self._episodes)
        self._episodes += 1
        self.agents = self.possible_agents[:]
        observations, self._state = self.env.reset(int(seed), controller="external")
        infos = {a: dict(self.env.info) for a in self.agents}
        return self._obs_dict(observations), infos

    def step(self, actions):
        joint = [int(actions[a]) for a in self.possible_agents]
        observations, self._state, reward, done = self.env.step(joint)
        truncated = done or self.env.truncated

        obs = self._obs_dict(observations)
        rewards = {a: float(reward) for a in self.agents}
        # no terminal states: episodes end only on the time limit or wind-data exhaustion
        terminations = {a: False for a in self.agents}
        truncations = {a: truncated for a in self.agents}
        infos = {a: dict(self.env.info) for a in self.agents}
        if truncated:
            self.agents = []
        return obs, rewards, terminations, truncations, infos
